"""Time-domain integration of the regularized linearized interface problem.

Interior, per side (both mapped to x1 > 0):

    A0 dtU - eps d1U + A1_tilde d1U + A2 d2U + C U = f,

with the five interface conditions at x1 = 0 (four jump conditions plus the
front equation) and the front advanced as a 1D advection equation in x2.
The -eps d1 term makes the interface noncharacteristic: the two zero-speed
fields per side acquire a small incoming speed and the interface conditions
become strictly dissipative.

Discretization: centered 2nd-order differences in x1 with first-order
one-sided end rows (together with trapezoid weights these satisfy exact
summation by parts, which the discrete adjoint check exercises), periodic
centered differences in x2, classical RK4 in time.  Interface closure per
stage: the four jump conditions are enforced by an equal-split projection
of the predicted traces (the correction to the magnetic trace acts along
the tangential direction so the zero-speed normal component is left to the
one-sided update), the front equation supplies dphi/dt, and the far wall
at x1 = X1 uses zero-order extrapolation with experiments sized so that
waves do not return.

A companion scalar transport equation per side tracks the source-induced
divergence f7 = div h_dot; it needs no interface condition because the
background transport field is tangent to the interface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import mhd
from .fields import FrontState, TwoSidedField
from .geometry import normal_component, tangential_component
from .grid import Grid, d1_field, d2_field, d2_line, one_sided_d1_at_wall
from .linearization import (
    BasicState,
    a1_tilde_grid,
    boundary_A1_exact,
    zero_order_matrix,
)


class BlowUpError(RuntimeError):
    def __init__(self, t: float, message: str = ""):
        super().__init__(message or f"non-finite field values at t = {t:.6g}")
        self.t = t


# --- grid construction ------------------------------------------------------


def speed_bound(basic: BasicState, epsilon: float = 0.0) -> float:
    """Upper bound on characteristic speeds of the straightened system."""
    bound = epsilon
    for side in (+1, -1):
        U = basic.u.side(side)
        rho = basic.rho(side)
        c2 = basic.gamma * U[0] / rho
        b2 = (U[3] ** 2 + U[4] ** 2) / rho
        cf = np.sqrt(c2 + b2)
        d1phi = np.abs(basic.d1phi_map(side))
        s2 = np.max(np.abs(U[2]) + cf)
        s1 = np.max(
            (np.abs(U[1]) + np.abs(basic.dtpsi(side)) + np.abs(basic.d2psi(side)) * s2 + cf)
            / d1phi
        ) + epsilon
        bound = max(bound, float(s1), float(s2))
    return bound


def build_grid(
    N1: int,
    N2: int,
    X1: float,
    X2: float,
    T_final: float,
    basic: BasicState | None = None,
    epsilon: float = 0.0,
    cfl_max: float = 0.4,
    speed: float | None = None,
) -> Grid:
    """Grid with a CFL-satisfying dt that divides T_final evenly."""
    proto = Grid(N1, N2, X1, X2)
    if speed is None:
        speed = speed_bound(basic, epsilon) if basic is not None else 1.0
    speed = max(speed, 1e-10)
    dt_max = cfl_max * min(proto.h1, proto.h2) / speed
    if dt_max <= 0:
        raise ValueError("CFL constraint cannot be met")
    n = max(int(np.ceil(T_final / dt_max)), 1) if T_final > 0 else 0
    dt = T_final / n if n else dt_max
    return Grid(N1, N2, X1, X2, dt=dt, T_final=T_final, cfl_max=cfl_max)


# --- assembled coefficients -------------------------------------------------


@dataclass
class SideCoefficients:
    A0_diag: np.ndarray      # (6, N1, N2)
    A0_inv_diag: np.ndarray
    At1: np.ndarray          # (6, 6, N1, N2)
    A2: np.ndarray
    C: np.ndarray
    d1phi: np.ndarray        # (N1, N2)
    d11phi: np.ndarray
    w1: np.ndarray           # background transport field components
    w2: np.ndarray
    div_u: np.ndarray
    d2psi: np.ndarray


@dataclass
class Coefficients:
    plus: SideCoefficients
    minus: SideCoefficients
    # interface data
    tau1: np.ndarray                 # tangential direction (d2phi, 1)
    jump_d1_p: np.ndarray
    jump_d1_Htau: np.ndarray
    d1_vN_plus: np.ndarray
    v2_hat_wall: np.ndarray
    A1_exact_plus: np.ndarray        # (6, 6, N2)
    A1_exact_minus: np.ndarray

    def side(self, side: int) -> SideCoefficients:
        return self.plus if side == +1 else self.minus


def _boundary_exact_grid(basic: BasicState, side: int) -> np.ndarray:
    d2phi = basic.geometry.d2_phi_boundary
    U = basic.u.side(side)[:, 0, :]
    out = np.zeros((6, 6, d2phi.size))
    for i2 in range(d2phi.size):
        from .linearization import BoundaryTrace

        tr = BoundaryTrace(H1=float(U[3, i2]), H2=float(U[4, i2]), d2phi=float(d2phi[i2]))
        out[:, :, i2] = boundary_A1_exact(tr, side)
    return out


def assemble_coefficients(basic: BasicState) -> Coefficients:
    g = basic.grid
    sides = {}
    for side in (+1, -1):
        U = basic.u.side(side)
        rho = basic.rho(side)
        A0 = np.stack([1.0 / (basic.gamma * U[0]), rho, rho,
                       np.ones_like(rho), np.ones_like(rho), np.ones_like(rho)])
        u1, u2 = basic.u_vec(side)
        w1, w2 = basic.w_vec(side)
        div_u = d1_field(u1[None], g.h1)[0] + d2_field(u2[None], g.h2)[0]
        sides[side] = SideCoefficients(
            A0_diag=A0,
            A0_inv_diag=1.0 / A0,
            At1=a1_tilde_grid(basic, side),
            A2=mhd.a2_matrix(U[0], U[2], U[3], U[4], rho, basic.gamma),
            C=zero_order_matrix(basic, side),
            d1phi=basic.d1phi_map(side),
            d11phi=basic.geometry.side("d11_phi", side),
            w1=w1,
            w2=w2,
            div_u=div_u,
            d2psi=basic.d2psi(side),
        )
    return Coefficients(
        plus=sides[+1],
        minus=sides[-1],
        tau1=basic.geometry.d2_phi_boundary,
        jump_d1_p=basic.jump_d1_p(),
        jump_d1_Htau=basic.jump_d1_Htau(),
        d1_vN_plus=basic.d1_vN_plus_wall(),
        v2_hat_wall=basic.u.plus[2, 0, :],
        A1_exact_plus=_boundary_exact_grid(basic, +1),
        A1_exact_minus=_boundary_exact_grid(basic, -1),
    )


# --- state ------------------------------------------------------------------


@dataclass
class Snapshot:
    U: TwoSidedField           # (6, N1, N2) per side
    phi: FrontState
    t: float
    a_plus: np.ndarray         # companion fields a = f7 / d1Phi
    a_minus: np.ndarray

    @staticmethod
    def zeros(grid: Grid, t: float = 0.0) -> "Snapshot":
        shape = (6, grid.N1, grid.N2)
        return Snapshot(
            U=TwoSidedField.zeros(shape),
            phi=FrontState(np.zeros(grid.N2), t),
            t=t,
            a_plus=np.zeros(shape[1:]),
            a_minus=np.zeros(shape[1:]),
        )

    def f7(self, coeffs: Coefficients, side: int) -> np.ndarray:
        a = self.a_plus if side == +1 else self.a_minus
        return a * coeffs.side(side).d1phi

    def check_finite(self) -> None:
        for arr in (self.U.plus, self.U.minus, self.phi.phi, self.a_plus, self.a_minus):
            if not np.all(np.isfinite(arr)):
                raise BlowUpError(self.t)

    def copy(self) -> "Snapshot":
        return Snapshot(self.U.copy(), self.phi.copy(), self.t,
                        self.a_plus.copy(), self.a_minus.copy())


@dataclass
class Sources:
    """Interior sources f_pm(t) and interface data g(t).

    f(t) must return a pair of (6, N1, N2) arrays, g(t) a (5, N2) array;
    either may be None for homogeneous data.
    """

    f: object = None
    g: object = None

    def f_eval(self, t: float, grid: Grid):
        if self.f is None:
            return None
        return self.f(t)

    def g_eval(self, t: float, grid: Grid):
        if self.g is None:
            return None
        return np.asarray(self.g(t), dtype=float)


def _upwind_d2(phi: np.ndarray, a: np.ndarray, h2: float) -> np.ndarray:
    """3rd-order upwind-biased periodic derivative for advection speed a."""
    dp = (
        2.0 * np.roll(phi, -1) + 3.0 * phi - 6.0 * np.roll(phi, 1) + np.roll(phi, 2)
    ) / (6.0 * h2)
    dm = (
        -np.roll(phi, -2) + 6.0 * np.roll(phi, -1) - 3.0 * phi - 2.0 * np.roll(phi, 1)
    ) / (6.0 * h2)
    return np.where(a >= 0.0, dp, dm)


# --- single step ------------------------------------------------------------


def _interior_rhs(U: np.ndarray, sc: SideCoefficients, epsilon: float,
                  f: np.ndarray | None, grid: Grid) -> np.ndarray:
    d1U = d1_field(U, grid.h1)
    d2U = d2_field(U, grid.h2)
    rhs = -(
        np.einsum("ijkl,jkl->ikl", sc.At1, d1U)
        + np.einsum("ijkl,jkl->ikl", sc.A2, d2U)
        + np.einsum("ijkl,jkl->ikl", sc.C, U)
    )
    if epsilon:
        rhs += epsilon * d1U
    if f is not None:
        rhs += f
    return rhs * sc.A0_inv_diag


def _companion_rhs(a: np.ndarray, sc: SideCoefficients, epsilon: float,
                   f_side: np.ndarray | None, grid: Grid) -> np.ndarray:
    d1a = d1_field(a[None], grid.h1)[0]
    d2a = d2_field(a[None], grid.h2)[0]
    rhs = -(sc.w1 * d1a + sc.w2 * d2a + a * (sc.div_u - epsilon * sc.d11phi)) / sc.d1phi
    if epsilon:
        rhs += epsilon * d1a
    if f_side is not None:
        # F = div f_h / d1Phi with f_h = (f_N, d1Phi * f_H2)
        fN = f_side[3] - f_side[4] * sc.d2psi
        fh2 = sc.d1phi * f_side[4]
        rhs += (d1_field(fN[None], grid.h1)[0] + d2_field(fh2[None], grid.h2)[0]) / sc.d1phi
    return rhs


def _front_rhs(phi: np.ndarray, Up: np.ndarray, coeffs: Coefficients,
               g_rows: np.ndarray | None, grid: Grid) -> np.ndarray:
    vN_plus = Up[1, 0, :] - Up[2, 0, :] * coeffs.tau1
    rhs = vN_plus + phi * coeffs.d1_vN_plus - coeffs.v2_hat_wall * _upwind_d2(
        phi, coeffs.v2_hat_wall, grid.h2
    )
    if g_rows is not None:
        rhs = rhs + g_rows[4]
    return rhs


def apply_interface_conditions(
    U: TwoSidedField, phi: np.ndarray, coeffs: Coefficients,
    g_rows: np.ndarray | None,
) -> None:
    """Project the predicted traces onto the four jump conditions (in place).

    Each jump residual is split equally between the sides; the magnetic
    correction acts along the tangential direction so the normal component
    (a zero-speed field) keeps its extrapolated value, as does the entropy.
    Also applies zero-order extrapolation at the far wall.
    """
    for arr in (U.plus, U.minus):
        arr[:, -1, :] = arr[:, -2, :]
    tp = U.plus[:, 0, :]
    tm = U.minus[:, 0, :]
    g = g_rows if g_rows is not None else np.zeros((5, tp.shape[1]))
    tau = coeffs.tau1

    r = tp[0] - tm[0] + phi * coeffs.jump_d1_p - g[0]
    tp[0] -= 0.5 * r
    tm[0] += 0.5 * r
    for k, grow in ((1, g[1]), (2, g[2])):
        r = tp[k] - tm[k] - grow
        tp[k] -= 0.5 * r
        tm[k] += 0.5 * r
    htau_p = tp[3] * tau + tp[4]
    htau_m = tm[3] * tau + tm[4]
    r = htau_p - htau_m + phi * coeffs.jump_d1_Htau - g[3]
    wt = 0.5 / (1.0 + tau ** 2)
    tp[3] -= r * wt * tau
    tp[4] -= r * wt
    tm[3] += r * wt * tau
    tm[4] += r * wt


def _stage_rhs(snap: Snapshot, coeffs: Coefficients, epsilon: float,
               sources: Sources, grid: Grid, t: float):
    fpm = sources.f_eval(t, grid)
    g_rows = sources.g_eval(t, grid)
    fp, fm = (fpm if fpm is not None else (None, None))
    return (
        _interior_rhs(snap.U.plus, coeffs.plus, epsilon, fp, grid),
        _interior_rhs(snap.U.minus, coeffs.minus, epsilon, fm, grid),
        _front_rhs(snap.phi.phi, snap.U.plus, coeffs, g_rows, grid),
        _companion_rhs(snap.a_plus, coeffs.plus, epsilon, fp, grid),
        _companion_rhs(snap.a_minus, coeffs.minus, epsilon, fm, grid),
    )


def _advance(snap: Snapshot, k, dt: float, coeffs: Coefficients,
             sources: Sources, grid: Grid, t_new: float) -> Snapshot:
    out = Snapshot(
        U=TwoSidedField(snap.U.plus + dt * k[0], snap.U.minus + dt * k[1]),
        phi=FrontState(snap.phi.phi + dt * k[2], t_new),
        t=t_new,
        a_plus=snap.a_plus + dt * k[3],
        a_minus=snap.a_minus + dt * k[4],
    )
    g_rows = sources.g_eval(t_new, grid)
    apply_interface_conditions(out.U, out.phi.phi, coeffs, g_rows)
    out.a_plus[-1, :] = out.a_plus[-2, :]
    out.a_minus[-1, :] = out.a_minus[-2, :]
    return out


def step(snapshot: Snapshot, basic: BasicState, epsilon: float,
         sources: Sources | None = None, coeffs: Coefficients | None = None,
         dt: float | None = None) -> Snapshot:
    """One classical RK4 step with per-stage interface closure."""
    grid = basic.grid
    if coeffs is None:
        coeffs = assemble_coefficients(basic)
    if sources is None:
        sources = Sources()
    if dt is None:
        dt = grid.dt
    t = snapshot.t

    k1 = _stage_rhs(snapshot, coeffs, epsilon, sources, grid, t)
    y2 = _advance(snapshot, k1, 0.5 * dt, coeffs, sources, grid, t + 0.5 * dt)
    k2 = _stage_rhs(y2, coeffs, epsilon, sources, grid, t + 0.5 * dt)
    y3 = _advance(snapshot, k2, 0.5 * dt, coeffs, sources, grid, t + 0.5 * dt)
    k3 = _stage_rhs(y3, coeffs, epsilon, sources, grid, t + 0.5 * dt)
    y4 = _advance(snapshot, k3, dt, coeffs, sources, grid, t + dt)
    k4 = _stage_rhs(y4, coeffs, epsilon, sources, grid, t + dt)
    ksum = tuple(
        (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0 for i in range(5)
    )
    out = _advance(snapshot, ksum, dt, coeffs, sources, grid, t + dt)
    out.check_finite()
    return out


# --- monitoring -------------------------------------------------------------


def _weighted_l2(field: np.ndarray, grid: Grid) -> float:
    w1 = grid.p_weights1
    sq = field ** 2
    while sq.ndim > 2:
        sq = sq.sum(axis=0)
    return float(np.sqrt(np.sum(sq * w1[:, None]) * grid.h2))


def _line_l2(line: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(np.sum(line ** 2) * grid.h2))


def symmetrizer_energy(snapshot: Snapshot, basic: BasicState,
                       coeffs: Coefficients | None = None) -> float:
    """The conserved quadratic integral sum_pm int (A0 U, U) dx."""
    if coeffs is None:
        coeffs = assemble_coefficients(basic)
    g = basic.grid
    total = 0.0
    for side in (+1, -1):
        U = snapshot.U.side(side)
        dens = np.sum(coeffs.side(side).A0_diag * U * U, axis=0)
        total += float(np.sum(dens * g.p_weights1[:, None]) * g.h2)
    return total


def divergence_monitor(snapshot: Snapshot, basic: BasicState,
                       coeffs: Coefficients | None = None):
    """L2 defect of div h_dot against the tracked companion field, per side."""
    if coeffs is None:
        coeffs = assemble_coefficients(basic)
    g = basic.grid
    out = []
    for side in (+1, -1):
        sc = coeffs.side(side)
        U = snapshot.U.side(side)
        hN = U[3] - U[4] * sc.d2psi
        h2c = U[4] * sc.d1phi
        div_h = d1_field(hN[None], g.h1)[0] + d2_field(h2c[None], g.h2)[0]
        out.append(_weighted_l2(div_h - snapshot.f7(coeffs, side), g))
    return tuple(out)


@dataclass(frozen=True)
class EnergyReport:
    t: float
    I_plus: float
    I_minus: float
    J: float
    Q_boundary: float
    div_defect_plus: float
    div_defect_minus: float
    phi_l2: float
    phi_d2_l2: float

    CSV_HEADER = "t,I_plus,I_minus,J,Q_boundary,div_defect_plus,div_defect_minus,phi_l2,phi_d2_l2"

    def csv_row(self) -> str:
        return ",".join(
            f"{v:.16e}" for v in (
                self.t, self.I_plus, self.I_minus, self.J, self.Q_boundary,
                self.div_defect_plus, self.div_defect_minus, self.phi_l2, self.phi_d2_l2,
            )
        )


def energy_report(snapshot: Snapshot, basic: BasicState,
                  prev: Snapshot | None = None,
                  coeffs: Coefficients | None = None) -> EnergyReport:
    """Per-side energies I (L2 of U, dtU, d2U), the front-augmented J, the
    interface quadratic form, and divergence defects.  dtU uses a backward
    difference of the stored levels (zero when no previous level exists)."""
    if coeffs is None:
        coeffs = assemble_coefficients(basic)
    g = basic.grid
    I = {}
    for side in (+1, -1):
        U = snapshot.U.side(side)
        val = _weighted_l2(U, g) ** 2 + _weighted_l2(d2_field(U, g.h2), g) ** 2
        if prev is not None and snapshot.t > prev.t:
            dtU = (U - prev.U.side(side)) / (snapshot.t - prev.t)
            val += _weighted_l2(dtU, g) ** 2
        I[side] = val
    phi = snapshot.phi.phi
    phi_l2 = _line_l2(phi, g)
    phi_d2 = _line_l2(d2_line(phi, g.h2, order=2), g)
    J = I[+1] + I[-1] + phi_l2 ** 2 + phi_d2 ** 2

    q = np.zeros(g.N2)
    for side, Aex in ((+1, coeffs.A1_exact_plus), (-1, coeffs.A1_exact_minus)):
        tr = snapshot.U.side(side)[:, 0, :]
        q -= 0.5 * np.einsum("ik,ijk,jk->k", tr, Aex, tr)
    dp, dm = divergence_monitor(snapshot, basic, coeffs)
    return EnergyReport(
        t=snapshot.t, I_plus=I[+1], I_minus=I[-1], J=J,
        Q_boundary=float(np.sum(q) * g.h2),
        div_defect_plus=dp, div_defect_minus=dm,
        phi_l2=phi_l2, phi_d2_l2=phi_d2,
    )


# --- run orchestration ------------------------------------------------------


@dataclass
class RunResult:
    reports: list[EnergyReport]
    final: Snapshot
    blew_up: bool = False
    blowup_time: float | None = None
    snapshots: list[Snapshot] = field(default_factory=list)

    @property
    def J_max(self) -> float:
        return max((r.J for r in self.reports), default=0.0)

    def csv_lines(self) -> list[str]:
        return [EnergyReport.CSV_HEADER] + [r.csv_row() for r in self.reports]


def run(basic: BasicState, epsilon: float, sources: Sources | None = None,
        initial: Snapshot | None = None, report_every: int = 1,
        store_snapshots_every: int = 0, n_steps: int | None = None,
        dt: float | None = None) -> RunResult:
    """Integrate to T_final, collecting energy reports along the way."""
    grid = basic.grid
    coeffs = assemble_coefficients(basic)
    if sources is None:
        sources = Sources()
    snap = initial.copy() if initial is not None else Snapshot.zeros(grid)
    if initial is not None:
        g_rows = sources.g_eval(snap.t, grid)
        apply_interface_conditions(snap.U, snap.phi.phi, coeffs, g_rows)
    if n_steps is None:
        n_steps = grid.n_steps
    if dt is None:
        dt = grid.dt
    reports = [energy_report(snap, basic, coeffs=coeffs)]
    stored = [snap.copy()] if store_snapshots_every else []
    prev = snap
    try:
        for n in range(1, n_steps + 1):
            new = step(prev, basic, epsilon, sources, coeffs, dt)
            if n % report_every == 0 or n == n_steps:
                reports.append(energy_report(new, basic, prev=prev, coeffs=coeffs))
            if store_snapshots_every and (n % store_snapshots_every == 0 or n == n_steps):
                stored.append(new.copy())
            prev = new
    except BlowUpError as exc:
        return RunResult(reports=reports, final=prev, blew_up=True,
                         blowup_time=exc.t, snapshots=stored)
    return RunResult(reports=reports, final=prev, snapshots=stored)


# --- homogenization lift ----------------------------------------------------


@dataclass
class BoundaryLift:
    """Regular two-sided field whose traces carry the interface data g.

    The + side absorbs the four jumps (with the front-lift feedback through
    the background normal-derivative jumps); the - side is zero.  The
    profile decays like exp(-x1/ell) off the interface.  front_lift solves
    the front equation driven by the lifted traces so that all five rows of
    the interface conditions are met by (U_tilde, phi_tilde).
    """

    basic: BasicState
    g_func: object
    epsilon: float = 0.0
    ell: float = 0.5

    def __post_init__(self):
        self._coeffs = assemble_coefficients(self.basic)
        g = self.basic.grid
        self._profile = np.exp(-g.x1 / self.ell)[:, None]
        self._phi_cache: dict[float, np.ndarray] = {}

    def _traces(self, t: float, phi_tilde: np.ndarray) -> np.ndarray:
        g_rows = np.asarray(self.g_func(t), dtype=float)
        c = self._coeffs
        tr = np.zeros((6, self.basic.grid.N2))
        tr[0] = g_rows[0] - phi_tilde * c.jump_d1_p
        tr[1] = g_rows[1]
        tr[2] = g_rows[2]
        tr[4] = g_rows[3] - phi_tilde * c.jump_d1_Htau  # H1 lift stays zero
        return tr

    def front_lift(self, times: np.ndarray) -> np.ndarray:
        """phi_tilde on the given uniform time levels (RK2 integration)."""
        g = self.basic.grid
        c = self._coeffs
        phis = np.zeros((len(times), g.N2))
        for n in range(len(times) - 1):
            dt = times[n + 1] - times[n]

            def rhs(t, phi):
                tr = self._traces(t, phi)
                g_rows = np.asarray(self.g_func(t), dtype=float)
                vN = tr[1] - tr[2] * c.tau1
                return g_rows[4] + vN + phi * c.d1_vN_plus - c.v2_hat_wall * _upwind_d2(
                    phi, c.v2_hat_wall, g.h2
                )

            k1 = rhs(times[n], phis[n])
            k2 = rhs(times[n] + dt, phis[n] + dt * k1)
            phis[n + 1] = phis[n] + 0.5 * dt * (k1 + k2)
        for t, p in zip(times, phis):
            self._phi_cache[round(float(t), 12)] = p
        return phis

    def _phi_at(self, t: float) -> np.ndarray:
        key = round(float(t), 12)
        if key in self._phi_cache:
            return self._phi_cache[key]
        return np.zeros(self.basic.grid.N2)

    def u_tilde(self, t: float) -> TwoSidedField:
        tr = self._traces(t, self._phi_at(t))
        plus = tr[:, None, :] * self._profile[None, :, :]
        return TwoSidedField(plus, np.zeros_like(plus))

    def interior_source(self, t: float, dt_probe: float = 1e-5) -> TwoSidedField:
        """F = -L U_tilde: the source the lifted field feeds the interior."""
        g = self.basic.grid
        c = self._coeffs
        Ut = self.u_tilde(t)
        Up = self.u_tilde(t + dt_probe)
        Um = self.u_tilde(t - dt_probe)
        out = []
        for side in (+1, -1):
            sc = c.side(side)
            U = Ut.side(side)
            dUdt = (Up.side(side) - Um.side(side)) / (2.0 * dt_probe)
            d1U = d1_field(U, g.h1)
            F = -(
                sc.A0_diag * dUdt
                + np.einsum("ijkl,jkl->ikl", sc.At1, d1U)
                + np.einsum("ijkl,jkl->ikl", sc.A2, d2_field(U, g.h2))
                + np.einsum("ijkl,jkl->ikl", sc.C, U)
            )
            if self.epsilon:
                F += self.epsilon * d1U
            out.append(F)
        return TwoSidedField(out[0], out[1])

    def source_h1_norm(self, times: np.ndarray) -> float:
        """Discrete space-time H1 norm of the induced interior source."""
        g = self.basic.grid
        levels = [self.interior_source(t) for t in times]
        total = 0.0
        dt = float(times[1] - times[0]) if len(times) > 1 else 1.0
        for n, F in enumerate(levels):
            for side in (+1, -1):
                A = F.side(side)
                sq = (
                    _weighted_l2(A, g) ** 2
                    + _weighted_l2(d1_field(A, g.h1), g) ** 2
                    + _weighted_l2(d2_field(A, g.h2), g) ** 2
                )
                if 0 < n < len(levels) - 1:
                    dA = (levels[n + 1].side(side) - levels[n - 1].side(side)) / (2 * dt)
                    sq += _weighted_l2(dA, g) ** 2
                total += sq * dt
        return float(np.sqrt(total))


def lift_boundary_data(g_func, grid: Grid, basic: BasicState,
                       epsilon: float = 0.0, ell: float = 0.5) -> BoundaryLift:
    if basic.grid is not grid and (basic.grid.N1, basic.grid.N2) != (grid.N1, grid.N2):
        raise ValueError("lift grid must match the basic-state grid")
    return BoundaryLift(basic=basic, g_func=g_func, epsilon=epsilon, ell=ell)


# --- boundary-data norm surrogate ------------------------------------------


def g_norm_h32(g_samples: np.ndarray, dt: float, h2: float) -> float:
    """Discrete surrogate for the H^{3/2} norm of interface data.

    H1 in (t, x2) plus a half-derivative in x2 applied as a Fourier
    multiplier |k|^(1/2) on the periodic grid.
    """
    g = np.asarray(g_samples, dtype=float)  # (Nt, 5, N2)
    Nt, _, N2 = g.shape
    sq = np.sum(g ** 2)
    if Nt > 2:
        dtg = (g[2:] - g[:-2]) / (2 * dt)
        sq += np.sum(dtg ** 2)
    d2g = (np.roll(g, -1, axis=-1) - np.roll(g, 1, axis=-1)) / (2 * h2)
    sq += np.sum(d2g ** 2)
    k = np.fft.fftfreq(N2, d=h2 / (2 * np.pi))
    ghat = np.fft.fft(g, axis=-1)
    sq += np.sum(np.abs(np.sqrt(np.abs(k)) * ghat) ** 2) / N2
    return float(np.sqrt(sq * dt * h2))


# --- epsilon sweep ----------------------------------------------------------


@dataclass
class EpsSweepResult:
    eps_list: list
    diffs: list            # ||U^{e_k} - U^{e_{k+1}}||_{L2(space-time)}
    ratios: list
    J_max: list
    trace_bound: list      # max_t ||eps * f7^+|_0||_{L2(x2)}
    truncated: bool = False

    def table_lines(self) -> list[str]:
        lines = ["eps,J_max,trace_bound,diff_to_next,ratio"]
        for i, eps in enumerate(self.eps_list):
            d = self.diffs[i] if i < len(self.diffs) else float("nan")
            r = self.ratios[i - 1] if 0 < i <= len(self.ratios) else float("nan")
            lines.append(
                f"{eps:.6e},{self.J_max[i]:.6e},{self.trace_bound[i]:.6e},{d:.6e},{r:.6e}"
            )
        return lines


def eps_sweep(basic: BasicState, eps_list, sources: Sources | None = None,
              initial: Snapshot | None = None, store_every: int = 4) -> EpsSweepResult:
    """Run the same problem over decreasing eps with a shared time grid."""
    eps_list = list(eps_list)
    if any(e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    grid = basic.grid
    coeffs = assemble_coefficients(basic)
    sols = []
    J_max = []
    trace_bound = []
    truncated = False
    for eps in eps_list:
        try:
            res = run(basic, eps, sources=sources, initial=initial,
                      report_every=max(grid.n_steps // 50, 1),
                      store_snapshots_every=store_every)
        except BlowUpError:
            truncated = True
            break
        if res.blew_up:
            truncated = True
            break
        sols.append(res.snapshots)
        J_max.append(res.J_max)
        tb = 0.0
        for snap in res.snapshots:
            f7w = snap.f7(coeffs, +1)[0, :]
            tb = max(tb, eps * _line_l2(f7w, grid))
        trace_bound.append(tb)
    diffs = []
    for s1, s2 in zip(sols, sols[1:]):
        acc = 0.0
        dt_eff = (s1[1].t - s1[0].t) if len(s1) > 1 else 1.0
        for a, b in zip(s1, s2):
            acc += (
                _weighted_l2(a.U.plus - b.U.plus, grid) ** 2
                + _weighted_l2(a.U.minus - b.U.minus, grid) ** 2
            ) * dt_eff
        diffs.append(float(np.sqrt(acc)))
    ratios = [d2 / d1 if d1 > 0 else float("inf") for d1, d2 in zip(diffs, diffs[1:])]
    return EpsSweepResult(
        eps_list=eps_list[: len(sols)], diffs=diffs, ratios=ratios,
        J_max=J_max, trace_bound=trace_bound, truncated=truncated,
    )


# --- discrete adjoint check -------------------------------------------------


def _random_spacetime_field(rng, Nt, N1, N2, boundary_supported: bool):
    f = rng.standard_normal((Nt, 6, N1, N2))
    # smooth a little so magnitudes stay O(1) after differencing
    for ax in (0, 2, 3):
        f = 0.25 * (np.roll(f, 1, axis=ax) + 2 * f + np.roll(f, -1, axis=ax))
    tmask = np.zeros(Nt)
    tmask[2:-2] = 1.0
    f *= tmask[:, None, None, None]
    xmask = np.zeros(N1)
    if boundary_supported:
        xmask[: N1 - 3] = 1.0   # nonzero at the interface, zero near far wall
    else:
        xmask[3 : N1 - 3] = 1.0
    f *= xmask[None, None, :, None]
    return f


def discrete_adjoint_check(basic_const: BasicState, epsilon: float,
                           trials: int = 20, seed: int = 0,
                           Nt: int = 12) -> float:
    """Max relative defect of the discrete duality identity.

    For the constant-coefficient operator L_pm = A0 Dt + (pm A1 - eps) D1
    + A2 D2 with centered stencils and trapezoid x1 weights,
    <LU, V> + <U, LV> must equal the interface quadrature
    -[(A1 U, V)] + eps * sum_pm <U_pm, V_pm> exactly (far-wall-vanishing
    fields), since each difference operator satisfies summation by parts.
    """
    g = basic_const.grid
    st = mhd.PlasmaState.from_vector(
        basic_const.u.plus[:, 0, 0], gamma=basic_const.gamma, A_eos=basic_const.A_eos
    )
    tri = mhd.assemble_matrices(st)
    stm = mhd.PlasmaState.from_vector(
        basic_const.u.minus[:, 0, 0], gamma=basic_const.gamma, A_eos=basic_const.A_eos
    )
    trim = mhd.assemble_matrices(stm)
    dt = 0.05
    w1 = g.p_weights1

    def dt_central(F):
        out = np.zeros_like(F)
        out[1:-1] = (F[2:] - F[:-2]) / (2 * dt)
        out[0] = F[1] / (2 * dt)
        out[-1] = -F[-2] / (2 * dt)
        return out

    def apply_L(F, side):
        tri_s = tri if side == +1 else trim
        B = side * tri_s.A1 - epsilon * np.eye(6)
        out = np.einsum("ij,tjkl->tikl", tri_s.A0, dt_central(F))
        out += np.einsum("ij,tjkl->tikl", B, d1_field(F, g.h1))
        out += np.einsum("ij,tjkl->tikl", tri_s.A2, d2_field(F, g.h2))
        return out

    def inner(F, G):
        return float(np.sum(F * G * w1[None, None, :, None]) * dt * g.h2)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for trial in range(trials):
        boundary = trial % 2 == 1
        defect_terms = 0.0
        btotal = 0.0
        scale = 0.0
        for side in (+1, -1):
            U = _random_spacetime_field(rng, Nt, g.N1, g.N2, boundary)
            V = _random_spacetime_field(rng, Nt, g.N1, g.N2, boundary)
            LU = apply_L(U, side)
            LV = apply_L(V, side)
            defect_terms += inner(LU, V) + inner(U, LV)
            tri_s = tri if side == +1 else trim
            B = side * tri_s.A1 - epsilon * np.eye(6)
            bt = -np.einsum("tik,ij,tjk->", U[:, :, 0, :], B, V[:, :, 0, :]) * dt * g.h2
            btotal += float(bt)
            scale += abs(inner(LU, V)) + abs(inner(U, LV))
        scale = max(scale, 1e-30)
        worst = max(worst, abs(defect_terms - btotal) / scale)
    return worst


# --- initial data helpers ---------------------------------------------------


def divergence_free_pulse(grid: Grid, center: float = 2.0, width: float = 0.35,
                          k2: int = 2, amplitude: float = 1.0,
                          seed: int = 0) -> Snapshot:
    """Smooth pulse supported away from both x1 boundaries.

    The magnetic part derives from a streamfunction, so div h_dot = 0 for a
    flat background front; pressure/velocity/entropy parts share the bump.
    """
    rng = np.random.default_rng(seed)
    X1, X2 = grid.mesh()
    bump = np.exp(-((X1 - center) / width) ** 2)
    snap = Snapshot.zeros(grid)
    for U, side in ((snap.U.plus, +1), (snap.U.minus, -1)):
        ph = rng.uniform(0, 2 * np.pi, size=4)
        U[0] = amplitude * bump * np.cos(k2 * X2 + ph[0])
        U[1] = amplitude * bump * np.sin(k2 * X2 + ph[1])
        U[2] = amplitude * bump * np.cos(k2 * X2 + ph[2])
        psi = amplitude * bump * np.sin(k2 * X2 + ph[3])
        # the straightened x2 flux component is side * H2, so the sign of
        # the streamfunction curl flips with the side
        U[3] = d2_field(psi[None], grid.h2)[0]
        U[4] = -side * d1_field(psi[None], grid.h1)[0]
        U[5] = amplitude * bump * np.sin(k2 * X2 + ph[0])
    return snap
