"""Variable-coefficient linearization about a frozen basic state.

Linearizing the straightened interior system about a background
(U_hat_pm, phi_hat) and passing to the good unknown

    U_dot = U - (Psi / d1Phi_hat) d1U_hat

yields the production operator

    A0(U_hat) dt U_dot + A1_tilde d1 U_dot + A2(U_hat) d2 U_dot + C U_dot = f,

with the effective normal matrix

    A1_tilde = (A1 - A0 dtPsi_hat - A2 d2Psi_hat) / d1Phi_hat

and the pointwise zero-order matrix C built from directional derivatives of
the coefficient matrices contracted with the background gradients.  This
module also houses the boundary algebra on the interface x1 = 0: the exact
sparse form of A1_tilde under the interface-continuity conditions, the
congruence to secondary variables W = (q, v_N, v2, H_N, H2, S) whose
boundary matrix B1 has inertia (2, 2, 2) per side, the five linearized
interface conditions, and the boundary quadratic form identity used by the
energy argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import mhd
from .fields import FrontState, TwoSidedField
from .geometry import (
    AdmissibilityError,
    LiftedGeometry,
    build_lifted_geometry,
    normal_component,
    normal_jump,
    tangential_component,
)
from .grid import Grid, d1_field, d2_field, d2_line, one_sided_d1_at_wall

ZERO_EIG_REL_TOL = 1e-9
MIN_D1PHI = 0.25


class GeometryError(ValueError):
    """Straightening map too close to degenerate for the linearized algebra."""


# --- boundary traces and the exact boundary matrix --------------------------


@dataclass(frozen=True)
class BoundaryTrace:
    """Background data entering the boundary algebra at a point of x1 = 0."""

    H1: float
    H2: float
    d2phi: float = 0.0

    @property
    def HN(self) -> float:
        return self.H1 - self.H2 * self.d2phi

    def require_admissible(self, kappa0: float = 1e-10) -> None:
        if abs(self.HN) < kappa0:
            raise AdmissibilityError(f"|H_N| = {abs(self.HN):.3g} below {kappa0}")


def boundary_A1_exact(trace: BoundaryTrace, side: int) -> np.ndarray:
    """A1_tilde restricted to x1 = 0 under the interface conditions.

    The matrix is side * M with M depending only on (H1, H2, d2phi) of the
    background trace; its sixth row and column vanish identically.
    """
    h1, h2, fp = trace.H1, trace.H2, trace.d2phi
    M = np.zeros((6, 6))
    M[0, 1] = M[1, 0] = 1.0
    M[0, 2] = M[2, 0] = -fp
    M[1, 3] = M[3, 1] = h2 * fp
    M[1, 4] = M[4, 1] = h2
    M[2, 3] = M[3, 2] = -h1 * fp
    M[2, 4] = M[4, 2] = -h1
    return float(side) * M


def w_transform_matrix(trace: BoundaryTrace) -> np.ndarray:
    """T with W = T U, W = (q, v_N, v2, H_N, H2, S), q = p + (H_hat, H)."""
    fp = trace.d2phi
    T = np.eye(6)
    T[0, 3] = trace.H1
    T[0, 4] = trace.H2
    T[1, 2] = -fp
    T[3, 4] = -fp
    return T


def j_matrix(trace: BoundaryTrace) -> np.ndarray:
    """J with U = J W; unit determinant, written out from the definitions."""
    fp = trace.d2phi
    J = np.eye(6)
    J[0, 3] = -trace.H1
    J[0, 4] = -(trace.H1 * fp + trace.H2)
    J[1, 2] = fp
    J[3, 4] = fp
    return J


def w_transform(U, trace: BoundaryTrace) -> np.ndarray:
    """Map a perturbation 6-vector to the secondary variables W."""
    return w_transform_matrix(trace) @ np.asarray(U, dtype=float)


def b1_structure(trace: BoundaryTrace, side: int) -> np.ndarray:
    """The congruent boundary matrix B1 = J^T A1_tilde J in W variables.

    Block layout over (q | v_N, v2 | H_N, H2 | S): a single (q, v_N)
    coupling, a -H_N a0 coupling between the velocity and magnetic blocks
    with a0 = [[1, d2phi], [d2phi, 1 + d2phi^2]] > 0, and a zero S line.
    At the interface d1Phi_pm = pm 1, giving the overall sign.
    """
    fp = trace.d2phi
    a0 = np.array([[1.0, fp], [fp, 1.0 + fp * fp]])
    B = np.zeros((6, 6))
    B[0, 1] = B[1, 0] = 1.0
    B[1:3, 3:5] = -trace.HN * a0
    B[3:5, 1:3] = -trace.HN * a0
    return float(side) * B


def w_congruence_check(trace: BoundaryTrace, side: int = +1) -> float:
    """Max-norm defect of J^T A1_tilde(exact) J against the B1 structure."""
    J = j_matrix(trace)
    defect = J.T @ boundary_A1_exact(trace, side) @ J - b1_structure(trace, side)
    return float(np.max(np.abs(defect)))


def _inertia(sym: np.ndarray) -> tuple[int, int, int]:
    lam = np.linalg.eigvalsh(sym)
    scale = max(np.max(np.abs(lam)), 1e-300)
    tol = ZERO_EIG_REL_TOL * scale
    n_pos = int(np.sum(lam > tol))
    n_neg = int(np.sum(lam < -tol))
    return n_pos, n_neg, len(lam) - n_pos - n_neg


def boundary_signature(trace: BoundaryTrace, side: int) -> tuple[int, int, int]:
    """Inertia (n_pos, n_neg, n_zero) of B1 on the given side."""
    return _inertia(b1_structure(trace, side))


def two_sided_signature(trace: BoundaryTrace) -> tuple[int, int, int]:
    """Inertia of diag(A1_tilde^+, A1_tilde^-) at the interface."""
    M = np.zeros((12, 12))
    M[:6, :6] = boundary_A1_exact(trace, +1)
    M[6:, 6:] = boundary_A1_exact(trace, -1)
    return _inertia(M)


# --- basic state ------------------------------------------------------------


@dataclass(frozen=True)
class StateBounds:
    K: float = 100.0
    rho_bar0: float = 1e-2
    p_bar0: float = 1e-2
    kappa_bar0: float = 1e-2
    epsilon_RT: float = 0.0


@dataclass
class BasicState:
    """Frozen background over the straightened half-plane pair.

    u holds the 6 components per side with shape (6, N1, N2); dt_u, d1_u,
    d2_u are its derivatives on the same grid (time-independent backgrounds
    carry dt_u = 0).  Geometry is the lift of phi_hat.
    """

    grid: Grid
    u: TwoSidedField
    phi_hat: FrontState
    geometry: LiftedGeometry
    dt_u: TwoSidedField
    d1_u: TwoSidedField
    d2_u: TwoSidedField
    dt_phi: np.ndarray
    gamma: float = mhd.GAMMA_DEFAULT
    A_eos: float = mhd.A_EOS_DEFAULT
    bounds: StateBounds = field(default_factory=StateBounds)

    # -- component access ----------------------------------------------------

    def comp(self, side: int, k: int) -> np.ndarray:
        return self.u.side(side)[k]

    def rho(self, side: int) -> np.ndarray:
        U = self.u.side(side)
        return mhd.eos_density(U[0], U[5], self.gamma, self.A_eos)

    def d1phi_map(self, side: int) -> np.ndarray:
        return self.geometry.side("d1_phi", side)

    def d2psi(self, side: int) -> np.ndarray:
        return self.geometry.side("d2_psi", side)

    def dtpsi(self, side: int) -> np.ndarray:
        return self.geometry.side("dt_psi", side)

    def vN(self, side: int) -> np.ndarray:
        U = self.u.side(side)
        return normal_component(U[1], U[2], self.d2psi(side))

    def HN(self, side: int) -> np.ndarray:
        U = self.u.side(side)
        return normal_component(U[3], U[4], self.d2psi(side))

    def Htau(self, side: int) -> np.ndarray:
        U = self.u.side(side)
        return tangential_component(U[3], U[4], self.d2psi(side))

    def u_vec(self, side: int) -> tuple[np.ndarray, np.ndarray]:
        """Straightened transport field u_hat = (v_N, v2 d1Phi)."""
        U = self.u.side(side)
        return self.vN(side), U[2] * self.d1phi_map(side)

    def w_vec(self, side: int) -> tuple[np.ndarray, np.ndarray]:
        """u_hat minus the front motion (dtPsi, 0); its first component
        vanishes on x1 = 0 for a valid background."""
        u1, u2 = self.u_vec(side)
        return u1 - self.dtpsi(side), u2

    def h_vec(self, side: int) -> tuple[np.ndarray, np.ndarray]:
        """Straightened magnetic field h_hat = (H_N, H2 d1Phi)."""
        U = self.u.side(side)
        return self.HN(side), U[4] * self.d1phi_map(side)

    # -- boundary data used by the linearized interface conditions -----------

    def boundary_trace(self, i2=None) -> BoundaryTrace:
        """Background boundary trace (uses the + side; valid states agree)."""
        d2phi = self.geometry.d2_phi_boundary
        U = self.u.plus[:, 0, :]
        if i2 is None:
            i2 = 0
        return BoundaryTrace(H1=float(U[3, i2]), H2=float(U[4, i2]), d2phi=float(d2phi[i2]))

    def jump_d1_p(self) -> np.ndarray:
        return normal_jump(self.u.plus[0], self.u.minus[0], self.grid.h1)

    def jump_d1_Htau(self) -> np.ndarray:
        out = []
        for side in (+1, -1):
            U = self.u.side(side)
            ht = tangential_component(U[3], U[4], self.d2psi(side))
            out.append(ht)
        return normal_jump(out[0], out[1], self.grid.h1)

    def d1_vN_plus_wall(self) -> np.ndarray:
        return one_sided_d1_at_wall(self.vN(+1), self.grid.h1)


def basic_state_from_arrays(
    grid: Grid,
    u_plus: np.ndarray,
    u_minus: np.ndarray,
    phi_hat: np.ndarray | None = None,
    dt_phi: np.ndarray | None = None,
    dt_u: TwoSidedField | None = None,
    gamma: float = mhd.GAMMA_DEFAULT,
    A_eos: float = mhd.A_EOS_DEFAULT,
    bounds: StateBounds | None = None,
) -> BasicState:
    """Build a BasicState from gridded data; derivatives via grid stencils."""
    if phi_hat is None:
        phi_hat = np.zeros(grid.N2)
    if dt_phi is None:
        dt_phi = np.zeros(grid.N2)
    front = FrontState(phi_hat)
    geometry = build_lifted_geometry(front, grid, dt_phi=dt_phi)
    u = TwoSidedField(u_plus, u_minus)
    if dt_u is None:
        dt_u = TwoSidedField.zeros(u.plus.shape)
    d1 = TwoSidedField(d1_field(u.plus, grid.h1), d1_field(u.minus, grid.h1))
    d2 = TwoSidedField(d2_field(u.plus, grid.h2), d2_field(u.minus, grid.h2))
    return BasicState(
        grid=grid, u=u, phi_hat=front, geometry=geometry,
        dt_u=dt_u, d1_u=d1, d2_u=d2, dt_phi=np.asarray(dt_phi, dtype=float),
        gamma=gamma, A_eos=A_eos, bounds=bounds or StateBounds(),
    )


def constant_basic_state(
    grid: Grid,
    p: float = 1.0,
    v2: float = 0.0,
    H1: float = 1.0,
    H2: float = 0.0,
    S_plus: float = 0.0,
    S_minus: float = 0.0,
    gamma: float = mhd.GAMMA_DEFAULT,
    A_eos: float = mhd.A_EOS_DEFAULT,
) -> BasicState:
    """Uniform background on both sides with flat static front.

    v1 = 0 is forced: the interface carries no mass flux, so the normal
    velocity must match the (zero) front speed.
    """
    shape = (6, grid.N1, grid.N2)
    up = np.zeros(shape)
    um = np.zeros(shape)
    for arr, S in ((up, S_plus), (um, S_minus)):
        arr[0] = p
        arr[2] = v2
        arr[3] = H1
        arr[4] = H2
        arr[5] = S
    return basic_state_from_arrays(grid, up, um, gamma=gamma, A_eos=A_eos)


# --- validation -------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_residual: float
    location: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckResult]
    tolerance: float

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self) -> list[str]:
        return [
            f"{c.name:<24s} {'PASS' if c.passed else 'FAIL'}  "
            f"max-residual {c.max_residual:.3e}" + (f"  at {c.location}" if c.location else "")
            for c in self.checks
        ]


def _argmax_loc(arr) -> str:
    arr = np.asarray(arr)
    if arr.size == 0:
        return ""
    idx = np.unravel_index(np.argmax(np.abs(arr)), arr.shape)
    return "idx" + str(tuple(int(i) for i in idx))


def validate_basic_state(basic: BasicState, tol: float = 1e-8) -> ValidationReport:
    """Check the background against the admissibility assumptions.

    positivity        p_hat, rho_hat bounded below by the declared constants
    interface_continuity   [p]=0, [v]=0, [H_tau]=0 and front speed = v_N^+ on x1=0
    normal_field      |H_N| >= kappa_bar0 on the interface
    induction         background magnetic field solves its transport system
    solenoidal        div h_hat = 0 and [H_N] = 0
    normal_velocity_jump   one-sided-sum jump of d1 v_N vanishes
    front_bound       sup |phi_hat| < 1
    """
    checks: list[CheckResult] = []
    b = basic.bounds
    g = basic.grid

    # positivity
    worst = 0.0
    loc = ""
    for side in (+1, -1):
        p = basic.comp(side, 0)
        rho = basic.rho(side)
        viol = np.maximum(b.p_bar0 - p, b.rho_bar0 - rho)
        m = float(np.max(viol))
        if m > worst:
            worst, loc = m, _argmax_loc(viol)
    checks.append(CheckResult("positivity", worst <= tol, max(worst, 0.0), loc))

    # interface continuity
    res = []
    for k in range(3):
        res.append(basic.u.plus[k, 0, :] - basic.u.minus[k, 0, :])
    res.append(basic.Htau(+1)[0, :] - basic.Htau(-1)[0, :])
    res.append(basic.dt_phi - basic.vN(+1)[0, :])
    res = np.abs(np.stack(res))
    checks.append(
        CheckResult("interface_continuity", float(np.max(res)) <= tol, float(np.max(res)), _argmax_loc(res))
    )

    # normal field bounded away from zero on the interface
    hn = np.minimum(np.abs(basic.HN(+1)[0, :]), np.abs(basic.HN(-1)[0, :]))
    short = float(np.max(b.kappa_bar0 - hn))
    checks.append(CheckResult("normal_field", short <= tol, max(short, 0.0), _argmax_loc(b.kappa_bar0 - hn)))

    # induction residual of the background
    worst = 0.0
    loc = ""
    for side in (+1, -1):
        U = basic.u.side(side)
        d1phi = basic.d1phi_map(side)
        w1, w2 = basic.w_vec(side)
        hv1, hv2 = basic.h_vec(side)
        u1, u2 = basic.u_vec(side)
        div_u = d1_field(u1[None], g.h1)[0] + d2_field(u2[None], g.h2)[0]
        for k in (3, 4):
            dH1 = basic.d1_u.side(side)[k]
            dH2 = basic.d2_u.side(side)[k]
            dv1 = basic.d1_u.side(side)[k - 2]
            dv2 = basic.d2_u.side(side)[k - 2]
            res = basic.dt_u.side(side)[k] + (
                w1 * dH1 + w2 * dH2 - (hv1 * dv1 + hv2 * dv2) + U[k] * div_u
            ) / d1phi
            m = float(np.max(np.abs(res)))
            if m > worst:
                worst, loc = m, _argmax_loc(res)
    checks.append(CheckResult("induction", worst <= tol, worst, loc))

    # solenoidal background field and continuous H_N
    worst = 0.0
    loc = ""
    for side in (+1, -1):
        hv1, hv2 = basic.h_vec(side)
        div_h = d1_field(hv1[None], g.h1)[0] + d2_field(hv2[None], g.h2)[0]
        m = float(np.max(np.abs(div_h)))
        if m > worst:
            worst, loc = m, _argmax_loc(div_h)
    hn_jump = basic.HN(+1)[0, :] - basic.HN(-1)[0, :]
    m = float(np.max(np.abs(hn_jump)))
    if m > worst:
        worst, loc = m, _argmax_loc(hn_jump)
    checks.append(CheckResult("solenoidal", worst <= tol, worst, loc))

    # one-sided-sum jump of the normal derivative of v_N
    jv = normal_jump(basic.vN(+1), basic.vN(-1), g.h1)
    m = float(np.max(np.abs(jv)))
    checks.append(CheckResult("normal_velocity_jump", m <= tol, m, _argmax_loc(jv)))

    sup = basic.phi_hat.sup_norm
    checks.append(CheckResult("front_bound", sup < 1.0, sup))

    return ValidationReport(checks=checks, tolerance=tol)


# --- effective matrices and the zero-order operator -------------------------


def _require_geometry(d1phi: np.ndarray) -> None:
    if float(np.min(np.abs(d1phi))) < MIN_D1PHI:
        raise GeometryError("|d1 Phi_hat| dropped below 1/4; lift not usable")


def a1_tilde_grid(basic: BasicState, side: int) -> np.ndarray:
    """A1_tilde = (A1 - A0 dtPsi - A2 d2Psi)/d1Phi on the grid, (6,6,N1,N2)."""
    U = basic.u.side(side)
    rho = basic.rho(side)
    g = basic.gamma
    d1phi = basic.d1phi_map(side)
    _require_geometry(d1phi)
    A0 = mhd.a0_matrix(U[0], rho, g)
    A1 = mhd.a1_matrix(U[0], U[1], U[3], U[4], rho, g)
    A2 = mhd.a2_matrix(U[0], U[2], U[3], U[4], rho, g)
    return (A1 - A0 * basic.dtpsi(side) - A2 * basic.d2psi(side)) / d1phi


def assemble_A1_tilde(basic: BasicState, side: int, point=None) -> np.ndarray:
    """A1_tilde at one grid point, or the whole grid when point is None."""
    At = a1_tilde_grid(basic, side)
    if point is None:
        return At
    i1, i2 = point
    return At[:, :, i1, i2]


def zero_order_matrix(basic: BasicState, side: int) -> np.ndarray:
    """Pointwise matrix of the zero-order operator C, shape (6,6,N1,N2).

    Column k is the directional derivative of the coefficient matrices in
    the k-th unit state direction, contracted with the background
    gradients: dA0 dtU_hat + dA1_tilde d1U_hat + dA2 d2U_hat.
    """
    U = basic.u.side(side)
    rho = basic.rho(side)
    g = basic.gamma
    d1phi = basic.d1phi_map(side)
    _require_geometry(d1phi)
    dtpsi = basic.dtpsi(side)
    d2psi = basic.d2psi(side)
    dtU = basic.dt_u.side(side)
    d1U = basic.d1_u.side(side)
    d2U = basic.d2_u.side(side)
    C = np.zeros((6, 6) + U.shape[1:])
    eye = np.eye(6)
    for k in range(6):
        Y = eye[k]
        dA0 = mhd.da0_matrix(U[0], rho, Y, g)
        dA1 = mhd.da1_matrix(U[0], U[1], rho, Y, g)
        dA2 = mhd.da2_matrix(U[0], U[2], rho, Y, g)
        dA1t = (dA1 - dA0 * dtpsi - dA2 * d2psi) / d1phi
        C[:, k] = (
            np.einsum("ij...,j...->i...", dA0, dtU)
            + np.einsum("ij...,j...->i...", dA1t, d1U)
            + np.einsum("ij...,j...->i...", dA2, d2U)
        )
    return C


def zero_order_C_apply(basic: BasicState, Y_field: np.ndarray, side: int, point=None):
    """Apply C to a state-space field (6, N1, N2) or 6-vector at a point."""
    C = zero_order_matrix(basic, side)
    if point is not None:
        i1, i2 = point
        return C[:, :, i1, i2] @ np.asarray(Y_field, dtype=float)
    return np.einsum("ij...,j...->i...", C, Y_field)


# --- good unknown -----------------------------------------------------------


def good_unknown(U_field: np.ndarray, psi_field: np.ndarray, basic: BasicState, side: int) -> np.ndarray:
    """U_dot = U - (Psi / d1Phi_hat) d1U_hat."""
    d1phi = basic.d1phi_map(side)
    _require_geometry(d1phi)
    return U_field - (psi_field / d1phi) * basic.d1_u.side(side)


def good_unknown_inverse(U_dot: np.ndarray, psi_field: np.ndarray, basic: BasicState, side: int) -> np.ndarray:
    d1phi = basic.d1phi_map(side)
    _require_geometry(d1phi)
    return U_dot + (psi_field / d1phi) * basic.d1_u.side(side)


def lift_front_perturbation(dphi: np.ndarray, grid: Grid, side: int) -> np.ndarray:
    """Psi-perturbation field chi(side * x1) * dphi on the (N1, N2) grid."""
    from .geometry import cutoff_chi

    return cutoff_chi(float(side) * grid.x1)[:, None] * np.asarray(dphi, dtype=float)[None, :]


# --- linearized operator ----------------------------------------------------


def apply_linearized_operator(
    U_dot: np.ndarray,
    basic: BasicState,
    side: int,
    Ut: np.ndarray | None = None,
    f: np.ndarray | None = None,
) -> np.ndarray:
    """Residual A0 dtU + A1_tilde d1U + A2 d2U + C U - f on the grid.

    Ut is the time derivative of U_dot (zero if omitted, for static
    perturbations); derivatives use the module's grid stencils.
    """
    g = basic.grid
    U = basic.u.side(side)
    rho = basic.rho(side)
    A0 = mhd.a0_matrix(U[0], rho, basic.gamma)
    A2 = mhd.a2_matrix(U[0], U[2], U[3], U[4], rho, basic.gamma)
    At1 = a1_tilde_grid(basic, side)
    C = zero_order_matrix(basic, side)
    res = (
        np.einsum("ij...,j...->i...", At1, d1_field(U_dot, g.h1))
        + np.einsum("ij...,j...->i...", A2, d2_field(U_dot, g.h2))
        + np.einsum("ij...,j...->i...", C, U_dot)
    )
    if Ut is not None:
        res += np.einsum("ij...,j...->i...", A0, Ut)
    if f is not None:
        res -= f
    return res


def first_variation(
    dU: np.ndarray,
    dphi: np.ndarray,
    basic: BasicState,
    side: int,
    dUt: np.ndarray | None = None,
    dphi_t: np.ndarray | None = None,
) -> np.ndarray:
    """Full first variation of the nonlinear interior operator.

    Equals the production operator applied to dU plus the front-transport
    term -(A0 dt dPsi + A1_tilde d1 dPsi + A2 d2 dPsi) d1U_hat / d1Phi_hat,
    which the production form absorbs into the good unknown.  The front
    perturbation dphi is lifted exactly like the background front (the lift
    is linear in phi), so the derivative fields of dPsi reuse the analytic
    cutoff slope and the boundary-line stencil.
    """
    g = basic.grid
    U = basic.u.side(side)
    rho = basic.rho(side)
    A0 = mhd.a0_matrix(U[0], rho, basic.gamma)
    A2 = mhd.a2_matrix(U[0], U[2], U[3], U[4], rho, basic.gamma)
    At1 = a1_tilde_grid(basic, side)
    d1phi = basic.d1phi_map(side)

    res = apply_linearized_operator(dU, basic, side, Ut=dUt)

    dgeo = build_lifted_geometry(
        FrontState(np.asarray(dphi, dtype=float)), g, dt_phi=dphi_t,
        skip_admissibility=True,
    )
    sgn = 1.0 if side == +1 else -1.0
    d1psi = dgeo.side("d1_phi", side) - sgn  # d1 of the lift alone
    d2psi = dgeo.side("d2_psi", side)
    lpsi = At1 * d1psi + A2 * d2psi
    if dphi_t is not None:
        lpsi = lpsi + A0 * dgeo.side("dt_psi", side)
    res -= np.einsum("ij...,j...->i...", lpsi, basic.d1_u.side(side) / d1phi)
    return res


# --- linearized interface conditions ----------------------------------------


def bc_residual(
    trace_plus: np.ndarray,
    trace_minus: np.ndarray,
    front: FrontState,
    basic: BasicState,
    dt_phi: np.ndarray | None = None,
    g_rows: np.ndarray | None = None,
) -> np.ndarray:
    """The five linearized interface conditions minus the boundary data g.

    Rows: pressure jump with front correction, the two velocity jumps, the
    tangential-field jump with front correction, and the front equation.
    Traces are (6, N2) arrays of perturbation values on x1 = 0.
    """
    gr = basic.grid
    d2phi_hat = basic.geometry.d2_phi_boundary
    phi = front.phi
    if dt_phi is None:
        dt_phi = np.zeros_like(phi)
    res = np.zeros((5, gr.N2))
    res[0] = trace_plus[0] - trace_minus[0] + phi * basic.jump_d1_p()
    res[1] = trace_plus[1] - trace_minus[1]
    res[2] = trace_plus[2] - trace_minus[2]
    htau_p = tangential_component(trace_plus[3], trace_plus[4], d2phi_hat)
    htau_m = tangential_component(trace_minus[3], trace_minus[4], d2phi_hat)
    res[3] = htau_p - htau_m + phi * basic.jump_d1_Htau()
    vN_p = normal_component(trace_plus[1], trace_plus[2], d2phi_hat)
    v2_hat = basic.u.plus[2, 0, :]
    res[4] = dt_phi + v2_hat * d2_line(phi, gr.h2, order=2) - vN_p - phi * basic.d1_vN_plus_wall()
    if g_rows is not None:
        res = res - g_rows
    return res


# --- boundary quadratic form ------------------------------------------------


def boundary_quadratic_form(
    trace_plus: np.ndarray,
    trace_minus: np.ndarray,
    basic: BasicState,
    tol_v: float = 1e-8,
):
    """-1/2 sum_pm (A1_tilde U, U)|_0 in matrix and closed form.

    Requires continuous velocity traces; under that constraint the matrix
    form collapses to -v_N^+ [p] + (H_N^+ v2^+ - H2^+ v_N^+) [H_tau].
    Returns (matrix_form, closed_form) as boundary grid functions.
    """
    jv = np.max(np.abs(trace_plus[1:3] - trace_minus[1:3]))
    if jv > tol_v:
        raise ValueError(f"velocity traces must agree ([v] max {jv:.3g} > {tol_v:.3g})")
    d2phi_hat = basic.geometry.d2_phi_boundary
    N2 = basic.grid.N2
    matrix_form = np.zeros(N2)
    for side, tr in ((+1, trace_plus), (-1, trace_minus)):
        for i2 in range(N2):
            A = boundary_A1_exact(basic.boundary_trace(i2), side)
            matrix_form[i2] -= 0.5 * tr[:, i2] @ A @ tr[:, i2]

    HN_hat = basic.HN(+1)[0, :]
    H2_hat = basic.u.plus[4, 0, :]
    vN_p = normal_component(trace_plus[1], trace_plus[2], d2phi_hat)
    jump_p = trace_plus[0] - trace_minus[0]
    htau_p = tangential_component(trace_plus[3], trace_plus[4], d2phi_hat)
    htau_m = tangential_component(trace_minus[3], trace_minus[4], d2phi_hat)
    closed_form = -vN_p * jump_p + (HN_hat * trace_plus[2] - H2_hat * vN_p) * (htau_p - htau_m)
    return matrix_form, closed_form
