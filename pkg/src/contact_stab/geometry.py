"""Front-straightening geometry.

The moving interface x1 = phi(t, x2) is flattened by mapping both sides onto
the half-plane {x1 >= 0} through

    Phi_pm(t, x) = pm x1 + Psi_pm,      Psi_pm(t, x) = chi(pm x1) phi(t, x2),

where chi is a C-infinity cutoff equal to 1 on [-1, 1], supported in
[-4, 4], with max |chi'| < 1/2.  When ||phi||_inf < 1 this forces
d1 Phi^+ >= 1/2 and d1 Phi^- <= -1/2, so the map is invertible on each side.

The cutoff is built from a plateau-shaped transition density: chi' on [1, 4]
is a constant-height C-infinity bump (height 1/2.4 < 1/2), and chi itself is
its integral, tabulated once on a dense grid and interpolated with a cubic
spline.  The slope bound is therefore explicit, not tuned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from .fields import FrontState
from .grid import Grid, d2_line


class AdmissibilityError(ValueError):
    """Front or geometry violates the invertibility regime."""


# --- smooth transition machinery -------------------------------------------

_EDGE = 0.2  # fraction of the transition used to ramp the density up/down
_SPAN = 3.0  # transition occupies [1, 4]
_DENSITY_HEIGHT = 1.0 / (_SPAN * (1.0 - _EDGE))  # = 1/2.4 < 1/2


def _smoothstep(t):
    """C-infinity monotone 0 -> 1 on [0, 1], flat to all orders at both ends."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0.0) & (t < 1.0)
    ti = t[inside]
    expo = np.clip(1.0 / ti - 1.0 / (1.0 - ti), -700.0, 700.0)
    out[inside] = 1.0 / (1.0 + np.exp(expo))
    out[t >= 1.0] = 1.0
    return out


def _smoothstep_d(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 1e-8) & (t < 1.0 - 1e-8)
    ti = t[inside]
    f = _smoothstep(ti)
    out[inside] = f * (1.0 - f) * (1.0 / ti ** 2 + 1.0 / (1.0 - ti) ** 2)
    return out


def _plateau_bump(u):
    """C-infinity bump on [0, 1]: ramps over [0, EDGE], flat 1, ramps down."""
    u = np.asarray(u, dtype=float)
    out = np.ones_like(u)
    lo = u < _EDGE
    hi = u > 1.0 - _EDGE
    out[lo] = _smoothstep(u[lo] / _EDGE)
    out[hi] = _smoothstep((1.0 - u[hi]) / _EDGE)
    out[(u <= 0.0) | (u >= 1.0)] = 0.0
    return out


def _plateau_bump_d(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    lo = (u > 0.0) & (u < _EDGE)
    hi = (u > 1.0 - _EDGE) & (u < 1.0)
    out[lo] = _smoothstep_d(u[lo] / _EDGE) / _EDGE
    out[hi] = -_smoothstep_d((1.0 - u[hi]) / _EDGE) / _EDGE
    return out


def _build_transition_spline():
    u = np.linspace(0.0, 1.0, 16001)
    B = _plateau_bump(u)
    IB = cumulative_simpson(B, x=u, initial=0.0)
    IB /= IB[-1]  # exact normalization: chi hits 0 at the outer edge
    return CubicSpline(u, IB)

_TRANSITION = _build_transition_spline()


def cutoff_chi(x1):
    """The cutoff chi: 1 on [-1, 1], 0 outside (-4, 4), C-infinity between."""
    x = np.abs(np.asarray(x1, dtype=float))
    out = np.zeros_like(x)
    out[x <= 1.0] = 1.0
    mid = (x > 1.0) & (x < 4.0)
    out[mid] = 1.0 - _TRANSITION((x[mid] - 1.0) / _SPAN)
    if np.ndim(x1) == 0:
        return float(out)
    return out


def cutoff_chi_d(x1):
    """chi': a plateau bump of height 1/2.4 on 1 < |x| < 4, odd in x."""
    x1 = np.asarray(x1, dtype=float)
    x = np.abs(x1)
    out = np.zeros_like(x)
    mid = (x > 1.0) & (x < 4.0)
    out[mid] = -_DENSITY_HEIGHT * _plateau_bump((x[mid] - 1.0) / _SPAN)
    out = out * np.sign(x1)
    if np.ndim(x1) == 0:
        return float(out)
    return out


def cutoff_chi_dd(x1):
    """chi''."""
    x1 = np.asarray(x1, dtype=float)
    x = np.abs(x1)
    out = np.zeros_like(x)
    mid = (x > 1.0) & (x < 4.0)
    out[mid] = -_DENSITY_HEIGHT * _plateau_bump_d((x[mid] - 1.0) / _SPAN) / _SPAN
    if np.ndim(x1) == 0:
        return float(out)
    return out


CHI_SLOPE_BOUND = _DENSITY_HEIGHT  # < 1/2 by construction


# --- lifted geometry --------------------------------------------------------


@dataclass(frozen=True)
class LiftedGeometry:
    """Psi_pm, Phi_pm and their derivatives on the (N1, N2) grid."""

    psi_plus: np.ndarray
    psi_minus: np.ndarray
    phi_map_plus: np.ndarray
    phi_map_minus: np.ndarray
    d1_phi_plus: np.ndarray     # d/dx1 of Phi^+
    d1_phi_minus: np.ndarray
    d2_psi_plus: np.ndarray
    d2_psi_minus: np.ndarray
    dt_psi_plus: np.ndarray
    dt_psi_minus: np.ndarray
    d11_phi_plus: np.ndarray    # d^2/dx1^2 of Phi^+ (= Psi^+ curvature)
    d11_phi_minus: np.ndarray
    d2_phi_boundary: np.ndarray

    def side(self, name: str, side: int) -> np.ndarray:
        return getattr(self, f"{name}_{'plus' if side == +1 else 'minus'}")


def build_lifted_geometry(
    front: FrontState, grid: Grid, dt_phi=None, skip_admissibility: bool = False
) -> LiftedGeometry:
    """Lift the front perturbation to both straightened half-planes.

    dt_phi, if given, is the time derivative of phi on the boundary grid;
    it propagates into dt_Psi_pm = chi(pm x1) dt_phi.  skip_admissibility
    is for lifting perturbation directions, which need not obey the
    sup-norm bound of an actual front.
    """
    if not skip_admissibility and not front.is_admissible:
        raise AdmissibilityError(
            f"front sup-norm {front.sup_norm:.3g} >= 1: straightening map degenerates"
        )
    phi = front.phi
    if phi.shape != (grid.N2,):
        raise ValueError("front resolution does not match grid.N2")
    x1 = grid.x1
    chi_p = cutoff_chi(x1)[:, None]
    chi_m = cutoff_chi(-x1)[:, None]
    dchi_p = cutoff_chi_d(x1)[:, None]
    dchi_m = cutoff_chi_d(-x1)[:, None]
    ddchi_p = cutoff_chi_dd(x1)[:, None]
    ddchi_m = cutoff_chi_dd(-x1)[:, None]
    d2phi = d2_line(phi, grid.h2)
    if dt_phi is None:
        dt_phi = np.zeros_like(phi)

    psi_p = chi_p * phi[None, :]
    psi_m = chi_m * phi[None, :]
    ones = np.ones_like(psi_p)
    return LiftedGeometry(
        psi_plus=psi_p,
        psi_minus=psi_m,
        phi_map_plus=x1[:, None] + psi_p,
        phi_map_minus=-x1[:, None] + psi_m,
        # d/dx1 [chi(-x1) phi] = -chi'(-x1) phi
        d1_phi_plus=ones + dchi_p * phi[None, :],
        d1_phi_minus=-ones - dchi_m * phi[None, :],
        d2_psi_plus=chi_p * d2phi[None, :],
        d2_psi_minus=chi_m * d2phi[None, :],
        dt_psi_plus=chi_p * np.asarray(dt_phi, dtype=float)[None, :],
        dt_psi_minus=chi_m * np.asarray(dt_phi, dtype=float)[None, :],
        d11_phi_plus=ddchi_p * phi[None, :],
        d11_phi_minus=ddchi_m * phi[None, :],
        d2_phi_boundary=d2phi,
    )


def normal_tangential(state, geometry: LiftedGeometry, side: int, point):
    """(v_N, H_N, H_tau) at a grid point (i1, i2) on the given side.

    v_N = v1 - v2 d2Psi, H_N = H1 - H2 d2Psi, H_tau = H1 d2Psi + H2.
    """
    i1, i2 = point
    slope = geometry.side("d2_psi", side)[i1, i2]
    vN = state.v1 - state.v2 * slope
    HN = state.H1 - state.H2 * slope
    Htau = state.H1 * slope + state.H2
    return vN, HN, Htau


def normal_component(a1, a2, d2psi):
    return a1 - a2 * d2psi


def tangential_component(a1, a2, d2psi):
    return a1 * d2psi + a2


def normal_jump(field_plus: np.ndarray, field_minus: np.ndarray, h1: float) -> np.ndarray:
    """One-sided-sum jump of the normal derivative at x1 = 0.

    Both sides live in the same half-plane after straightening, so the jump
    of a normal derivative is the SUM of the two one-sided derivatives,
    [d1 a] = d1 a^+|_0 + d1 a^-|_0, not their difference.
    """
    def one_sided(a):
        a = np.asarray(a, dtype=float)
        return (-3.0 * a[..., 0, :] + 4.0 * a[..., 1, :] - a[..., 2, :]) / (2.0 * h1)

    return one_sided(field_plus) + one_sided(field_minus)
