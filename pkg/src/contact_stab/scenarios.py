"""Scenario library: named experiments assembled from the library modules.

Each runner takes a parsed ScenarioConfig and returns a ScenarioResult
holding a text report, CSV tables keyed by file name, optional snapshot
dumps, and the exit status (0 success, 1 check failure, 2 config error,
3 numerical blow-up).  Runners are deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import mhd, solver, spectral
from .config import ConfigError, ScenarioConfig
from .fields import FrontState, TwoSidedField
from .grid import Grid
from .linearization import (
    BasicState,
    basic_state_from_arrays,
    constant_basic_state,
    validate_basic_state,
)
from .solver import Snapshot, Sources


@dataclass
class ScenarioResult:
    ok: bool
    exit_code: int
    report: list[str] = dc_field(default_factory=list)
    csv: dict = dc_field(default_factory=dict)          # name -> list[str]
    snapshots: list = dc_field(default_factory=list)    # (name, Snapshot, Grid)
    data: dict = dc_field(default_factory=dict)         # machine-readable extras


# --- basic-state builders ---------------------------------------------------


def constant_state_from_config(cfg: ScenarioConfig, grid: Grid) -> BasicState:
    return constant_basic_state(
        grid,
        p=cfg["state.p"], v2=cfg["state.v2"],
        H1=cfg["state.H1"], H2=cfg["state.H2"],
        S_plus=cfg["state.S_plus"], S_minus=cfg["state.S_minus"],
        gamma=cfg["physics.gamma"],
    )


def rt_pressure_profile(x1: np.ndarray) -> np.ndarray:
    """sigma(x1) = x1 exp(-x1^2/2): unit slope at the interface, localized."""
    return x1 * np.exp(-0.5 * x1 ** 2)


def rt_basic_state(grid: Grid, p0: float = 1.0, rt_jump: float = 0.5,
                   v2: float = 0.0, H1: float = 1.0, H2: float = 0.3,
                   S_plus: float = 0.2, S_minus: float = -0.1,
                   gamma: float = mhd.GAMMA_DEFAULT) -> BasicState:
    """Static background whose one-sided-sum pressure-slope jump at the
    interface equals rt_jump; positive values are the stable sign."""
    sigma = rt_pressure_profile(grid.x1)[:, None]
    shape = (6, grid.N1, grid.N2)
    up = np.zeros(shape)
    um = np.zeros(shape)
    half = 0.5 * rt_jump
    for arr, s_slope, S in ((up, half, S_plus), (um, half, S_minus)):
        arr[0] = p0 + s_slope * sigma
        arr[2] = v2
        arr[3] = H1
        arr[4] = H2
        arr[5] = S
    return basic_state_from_arrays(grid, up, um, gamma=gamma)


def rt_state_from_config(cfg: ScenarioConfig, grid: Grid) -> BasicState:
    return rt_basic_state(
        grid, p0=cfg["state.p0"], rt_jump=cfg["state.rt_jump"],
        v2=cfg["state.v2"], H1=cfg["state.H1"], H2=cfg["state.H2"],
        S_plus=cfg["state.S_plus"], S_minus=cfg["state.S_minus"],
        gamma=cfg["physics.gamma"],
    )


def expression_state_from_config(cfg: ScenarioConfig, grid: Grid) -> BasicState:
    X1g, X2g = grid.mesh()
    arrays = {}
    comps = ("p", "v1", "v2", "H1", "H2", "S")
    for side in ("plus", "minus"):
        U = np.zeros((6, grid.N1, grid.N2))
        for k, comp in enumerate(comps):
            U[k] = np.broadcast_to(
                np.asarray(cfg[f"state.{comp}_{side}"](t=0.0, x1=X1g, x2=X2g), dtype=float),
                (grid.N1, grid.N2),
            )
        arrays[side] = U
    phi = np.broadcast_to(
        np.asarray(cfg["front.phi"](t=0.0, x1=0.0, x2=grid.x2), dtype=float), (grid.N2,)
    ).copy()
    dt_phi = np.broadcast_to(
        np.asarray(cfg["front.dt_phi"](t=0.0, x1=0.0, x2=grid.x2), dtype=float), (grid.N2,)
    ).copy()
    return basic_state_from_arrays(
        grid, arrays["plus"], arrays["minus"], phi_hat=phi, dt_phi=dt_phi,
        gamma=cfg["physics.gamma"],
    )


def contact_pair_from_config(cfg: ScenarioConfig) -> spectral.ContactPair:
    gamma = cfg["physics.gamma"]

    def st(S):
        return mhd.PlasmaState(cfg["state.p"], 0.0, cfg["state.v2"],
                               cfg["state.H1"], cfg["state.H2"], S, gamma=gamma)

    return spectral.ContactPair(st(cfg["state.S_plus"]), st(cfg["state.S_minus"]))


def grid_from_config(cfg: ScenarioConfig, basic_builder=None,
                     epsilon: float | None = None, T_final: float | None = None) -> Grid:
    proto = Grid(cfg["grid.N1"], cfg["grid.N2"], cfg["grid.X1"], cfg["grid.X2"])
    if T_final is None:
        T_final = cfg.get("run.T_final", 0.0)
    if epsilon is None:
        epsilon = cfg.get("run.epsilon", 0.0)
    basic = basic_builder(cfg, proto) if basic_builder is not None else None
    return solver.build_grid(
        cfg["grid.N1"], cfg["grid.N2"], cfg["grid.X1"], cfg["grid.X2"],
        T_final, basic=basic, epsilon=epsilon, cfl_max=cfg["grid.cfl_max"],
    )


# --- seeded interface/interior forcing --------------------------------------


def smooth_ramp(t, t_ramp: float):
    """C^1 ramp: 0 at t <= 0, 1 for t >= t_ramp."""
    s = np.clip(np.asarray(t, dtype=float) / t_ramp, 0.0, 1.0)
    return 0.5 * (1.0 - np.cos(np.pi * s))


def make_forcing(grid: Grid, seed: int, amplitude: float, t_ramp: float,
                 k2: int) -> Sources:
    """Deterministic smooth forcing: interior f on both sides plus interface
    data g, all ramped from zero so the data vanish for t <= 0."""
    rng = np.random.default_rng(seed)
    X1g, X2g = grid.mesh()
    bump = np.exp(-((X1g - 1.5) / 0.5) ** 2)
    f_amp = {s: amplitude * rng.uniform(0.3, 1.0, size=6) for s in (+1, -1)}
    f_ph = {s: rng.uniform(0, 2 * np.pi, size=6) for s in (+1, -1)}
    f_wt = {s: rng.uniform(0.5, 1.5, size=6) for s in (+1, -1)}
    g_amp = amplitude * rng.uniform(0.1, 0.4, size=5)
    g_ph = rng.uniform(0, 2 * np.pi, size=5)
    g_wt = rng.uniform(0.5, 1.5, size=5)

    def shape_f(side, t):
        A = f_amp[side][:, None, None]
        ph = f_ph[side][:, None, None]
        wt = f_wt[side][:, None, None]
        return A * bump[None] * np.cos(k2 * X2g[None] + ph) * np.cos(wt * t + ph)

    def f(t):
        r = float(smooth_ramp(t, t_ramp))
        return (r * shape_f(+1, t), r * shape_f(-1, t))

    x2 = grid.x2

    def g(t):
        r = float(smooth_ramp(t, t_ramp))
        return r * (
            g_amp[:, None] * np.cos(k2 * x2[None, :] + g_ph[:, None])
            * np.cos(g_wt[:, None] * t + g_ph[:, None])
        )

    return Sources(f=f, g=g)


def source_h1_norm(f_func, grid: Grid, times: np.ndarray) -> float:
    """Discrete space-time H1 norm of a two-sided interior source."""
    from .grid import d1_field, d2_field

    levels = [f_func(t) for t in times]
    dt = float(times[1] - times[0]) if len(times) > 1 else 1.0
    total = 0.0
    for n, pair in enumerate(levels):
        for k in range(2):
            A = np.asarray(pair[k], dtype=float)
            sq = (
                solver._weighted_l2(A, grid) ** 2
                + solver._weighted_l2(d1_field(A, grid.h1), grid) ** 2
                + solver._weighted_l2(d2_field(A, grid.h2), grid) ** 2
            )
            if 0 < n < len(levels) - 1:
                dA = (np.asarray(levels[n + 1][k]) - np.asarray(levels[n - 1][k])) / (2 * dt)
                sq += solver._weighted_l2(dA, grid) ** 2
            total += sq * dt
    return float(np.sqrt(total))


# --- manufactured solution --------------------------------------------------


@dataclass
class ManufacturedProblem:
    """Separable smooth exact solution on a uniform contact background.

    Fields A e^(-2 x1) cos(w2 x2 + a) cos(wt t + b) per component and side,
    plus a compatible front; interior and interface sources are generated
    analytically so a solver run against them measures pure scheme error.
    """

    state_plus: mhd.PlasmaState
    state_minus: mhd.PlasmaState
    epsilon: float
    omega2: float = 2.0
    omega_t: float = 1.5
    amplitude: float = 1.0
    seed: int = 7

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        self.tri = {
            +1: mhd.assemble_matrices(self.state_plus),
            -1: mhd.assemble_matrices(self.state_minus),
        }
        self.amps = {s: self.amplitude * rng.uniform(0.5, 1.0, size=6) for s in (+1, -1)}
        self.alph = {s: rng.uniform(0, 2 * np.pi, size=6) for s in (+1, -1)}
        self.beta = {s: rng.uniform(0, 2 * np.pi, size=6) for s in (+1, -1)}
        self.front_amp = 0.3 * self.amplitude
        self.front_alpha = rng.uniform(0, 2 * np.pi)
        self.front_beta = rng.uniform(0, 2 * np.pi)

    def exact(self, side, t, X1g, X2g, dt_order=0, d1_order=0, d2_order=0):
        A = self.amps[side][:, None, None]
        al = self.alph[side][:, None, None]
        be = self.beta[side][:, None, None]
        w2, wt = self.omega2, self.omega_t
        fx1 = (-2.0) ** d1_order * np.exp(-2.0 * X1g)[None]
        arg2 = w2 * X2g[None] + al
        fx2 = w2 ** d2_order * np.cos(arg2 + 0.5 * np.pi * d2_order)
        argt = wt * t + be
        ft = wt ** dt_order * np.cos(argt + 0.5 * np.pi * dt_order)
        return A * fx1 * fx2 * ft

    def front(self, t, x2, dt_order=0, d2_order=0):
        w2, wt = self.omega2, self.omega_t
        f2 = w2 ** d2_order * np.cos(w2 * x2 + self.front_alpha + 0.5 * np.pi * d2_order)
        ft = wt ** dt_order * np.cos(wt * t + self.front_beta + 0.5 * np.pi * dt_order)
        return self.front_amp * f2 * ft

    def sources(self, grid: Grid) -> Sources:
        X1g, X2g = grid.mesh()
        x2 = grid.x2
        v2h = self.state_plus.v2

        def f(t):
            out = []
            for side in (+1, -1):
                tri = self.tri[side]
                B = side * tri.A1 - self.epsilon * np.eye(6)
                F = (
                    np.einsum("ij,jkl->ikl", tri.A0, self.exact(side, t, X1g, X2g, dt_order=1))
                    + np.einsum("ij,jkl->ikl", B, self.exact(side, t, X1g, X2g, d1_order=1))
                    + np.einsum("ij,jkl->ikl", tri.A2, self.exact(side, t, X1g, X2g, d2_order=1))
                )
                out.append(F)
            return tuple(out)

        def g(t):
            trp = self.exact(+1, t, X1g, X2g)[:, 0, :]
            trm = self.exact(-1, t, X1g, X2g)[:, 0, :]
            rows = np.zeros((5, grid.N2))
            rows[0] = trp[0] - trm[0]
            rows[1] = trp[1] - trm[1]
            rows[2] = trp[2] - trm[2]
            rows[3] = trp[4] - trm[4]
            rows[4] = self.front(t, x2, dt_order=1) + v2h * self.front(t, x2, d2_order=1) - trp[1]
            return rows

        return Sources(f=f, g=g)

    def initial(self, grid: Grid) -> Snapshot:
        from .grid import d1_field, d2_field

        X1g, X2g = grid.mesh()
        Up = self.exact(+1, 0.0, X1g, X2g)
        Um = self.exact(-1, 0.0, X1g, X2g)
        # companion fields start from the discrete divergence of the initial
        # data (flat background front: h_dot = (H1, H2), d1Phi = +-1)
        a = {}
        for side, U in ((+1, Up), (-1, Um)):
            div_h = (
                d1_field(U[3][None], grid.h1)[0]
                + side * d2_field(U[4][None], grid.h2)[0]
            )
            a[side] = div_h / side  # a = f7 / d1Phi with d1Phi = side
        return Snapshot(
            U=TwoSidedField(Up, Um),
            phi=FrontState(np.asarray(self.front(0.0, grid.x2), dtype=float)),
            t=0.0,
            a_plus=a[+1],
            a_minus=a[-1],
        )

    def run_error(self, grid: Grid, basic: BasicState, store_every: int | None = None):
        """(relative space-time L2 error, max divergence defect) of a run."""
        if store_every is None:
            store_every = max(grid.n_steps // 8, 1)
        res = solver.run(basic, self.epsilon, sources=self.sources(grid),
                         initial=self.initial(grid), store_snapshots_every=store_every,
                         report_every=max(grid.n_steps // 8, 1))
        if res.blew_up:
            raise solver.BlowUpError(res.blowup_time or 0.0)
        X1g, X2g = grid.mesh()
        err = 0.0
        norm = 0.0
        for s in res.snapshots:
            for side in (+1, -1):
                d = s.U.side(side) - self.exact(side, s.t, X1g, X2g)
                err += solver._weighted_l2(d, grid) ** 2
                norm += solver._weighted_l2(self.exact(side, s.t, X1g, X2g), grid) ** 2
        div_defect = max(
            max(r.div_defect_plus, r.div_defect_minus) for r in res.reports
        )
        return float(np.sqrt(err / norm)), div_defect


def mms_problem_from_config(cfg: ScenarioConfig) -> ManufacturedProblem:
    def st(S):
        return mhd.PlasmaState(cfg["state.p"], 0.0, cfg["state.v2"],
                               cfg["state.H1"], cfg["state.H2"], S,
                               gamma=cfg["physics.gamma"])

    return ManufacturedProblem(
        state_plus=st(cfg["state.S_plus"]), state_minus=st(cfg["state.S_minus"]),
        epsilon=cfg["run.epsilon"], omega2=cfg["mms.omega2"],
        omega_t=cfg["mms.omega_t"], amplitude=cfg["mms.amplitude"],
        seed=cfg["run.seed"] or 7,
    )


def _fit_order(hs, errs) -> float:
    hs = np.log(np.asarray(hs, dtype=float))
    errs = np.log(np.asarray(errs, dtype=float))
    return float(np.polyfit(hs, errs, 1)[0])


# --- scenario runners -------------------------------------------------------


def run_validate_state(cfg: ScenarioConfig) -> ScenarioResult:
    grid = Grid(cfg["grid.N1"], cfg["grid.N2"], cfg["grid.X1"], cfg["grid.X2"])
    kind = cfg.get("state.kind", "constant")
    try:
        if kind == "constant":
            basic = constant_state_from_config(cfg, grid)
        elif kind == "rt":
            basic = rt_state_from_config(cfg, grid)
        else:
            basic = expression_state_from_config(cfg, grid)
    except (ValueError, ConfigError) as exc:
        return ScenarioResult(ok=False, exit_code=2, report=[f"state construction failed: {exc}"])
    report = validate_basic_state(basic, tol=cfg.get("tolerance.validate", 1e-8))
    lines = report.lines()
    ok = report.all_passed
    lines.append(f"overall: {'PASS' if ok else 'FAIL'}")
    return ScenarioResult(ok=ok, exit_code=0 if ok else 1, report=lines,
                          data={"report": report})


SPECTRUM_CSV_HEADER = "eta,xi,omega2,re_delta,im_delta,abs_delta_normalized,conditioning"


def run_spectrum(cfg: ScenarioConfig) -> ScenarioResult:
    pair = contact_pair_from_config(cfg)
    w2 = cfg["spectral.omega2"]
    etas = np.linspace(cfg["spectral.eta_min"], cfg["spectral.eta_max"], cfg["spectral.n_eta"])
    xis = np.linspace(cfg["spectral.xi_min"], cfg["spectral.xi_max"], cfg["spectral.n_xi"])
    lines = [SPECTRUM_CSV_HEADER]
    min_abs = np.inf
    values = np.zeros((len(etas), len(xis)))
    for i, eta in enumerate(etas):
        for j, xi in enumerate(xis):
            pt = spectral.LaplaceFourierPoint(complex(eta, xi), w2)
            try:
                mr = spectral.lopatinski_determinant(pt, pair)
                d = mr.lopatinski_value
                cond = mr.conditioning
            except spectral.DegeneratePointError:
                d, cond = complex(np.nan, np.nan), np.nan
            a = abs(d)
            values[i, j] = a
            min_abs = min(min_abs, a)
            lines.append(
                f"{eta:.8e},{xi:.8e},{w2:.8e},{d.real:.8e},{d.imag:.8e},{a:.8e},{cond:.8e}"
            )
    neutral = []
    for eta in (0.05, 0.025, 0.0125):
        pt = spectral.LaplaceFourierPoint(complex(eta, -w2 * pair.plus.v2), w2)
        neutral.append(abs(spectral.lopatinski_determinant(pt, pair).lopatinski_value))
    ok = bool(np.all(np.isfinite(values)) and min_abs > 0.0
              and neutral[0] > neutral[1] > neutral[2])
    report = [
        f"scan {len(etas)}x{len(xis)} at omega2={w2}: min |Delta| = {min_abs:.6e}",
        "neutral-family |Delta| at eta=0.05,0.025,0.0125: "
        + ", ".join(f"{v:.6e}" for v in neutral),
        f"monotone decay toward eta=0: {'yes' if neutral[0] > neutral[1] > neutral[2] else 'no'}",
        f"overall: {'PASS' if ok else 'FAIL'}",
    ]
    return ScenarioResult(ok=ok, exit_code=0 if ok else 1, report=report,
                          csv={"spectrum.csv": lines},
                          data={"min_abs": float(min_abs), "neutral": neutral})


def run_energy_test(cfg: ScenarioConfig) -> ScenarioResult:
    eps = cfg["run.epsilon"]
    grid = grid_from_config(cfg, constant_state_from_config, epsilon=eps)
    basic = constant_state_from_config(cfg, grid)
    coeffs = solver.assemble_coefficients(basic)
    init = solver.divergence_free_pulse(
        grid, center=cfg["pulse.center"], width=cfg["pulse.width"],
        k2=cfg["pulse.k2"], amplitude=cfg["pulse.amplitude"], seed=cfg["run.seed"],
    )
    snap = init.copy()
    solver.apply_interface_conditions(snap.U, snap.phi.phi, coeffs, None)
    E0 = solver.symmetrizer_energy(snap, basic, coeffs)
    energies = [E0]
    reports = [solver.energy_report(snap, basic, coeffs=coeffs)]
    prev = snap
    every = cfg["run.report_every"]
    try:
        for n in range(1, grid.n_steps + 1):
            new = solver.step(prev, basic, eps, coeffs=coeffs)
            energies.append(solver.symmetrizer_energy(new, basic, coeffs))
            if n % every == 0 or n == grid.n_steps:
                reports.append(solver.energy_report(new, basic, prev=prev, coeffs=coeffs))
            prev = new
    except solver.BlowUpError as exc:
        return ScenarioResult(ok=False, exit_code=3,
                              report=[f"blow-up at t = {exc.t:.6g}"])
    energies = np.array(energies)
    drift = float(np.max(np.abs(energies - E0)) / E0)
    increase = float(max(np.max(energies) - E0, 0.0) / E0)
    tol = cfg["tolerance.drift"]
    ok = drift <= tol and increase <= tol
    csv = {"energy.csv": [solver.EnergyReport.CSV_HEADER] + [r.csv_row() for r in reports]}
    elines = ["step,E_symmetrizer"] + [f"{i},{e:.16e}" for i, e in enumerate(energies)]
    csv["symmetrizer_energy.csv"] = elines
    report = [
        f"grid {grid.N1}x{grid.N2}, eps={eps}, T={grid.T_final}, steps={grid.n_steps}",
        f"relative drift of the symmetrizer energy: {drift:.3e} (tolerance {tol})",
        f"relative increase: {increase:.3e}",
        f"overall: {'PASS' if ok else 'FAIL'}",
    ]
    return ScenarioResult(ok=ok, exit_code=0 if ok else 1, report=report, csv=csv,
                          data={"drift": drift, "increase": increase,
                                "energies": energies})


def neutral_mode_discrete_error(N: int, cfg: ScenarioConfig) -> float:
    """Error of the advected entropy/front mode after a fixed horizon."""
    sub = dict(cfg.values)
    sub["grid.N1"], sub["grid.N2"] = N, N
    scfg = ScenarioConfig(kind=cfg.kind, values=sub, raw=cfg.raw)
    eps = cfg["run.epsilon"]
    grid = grid_from_config(scfg, constant_state_from_config, epsilon=eps)
    basic = constant_state_from_config(scfg, grid)
    k = cfg["neutral.omega2"]
    v2 = cfg["state.v2"]
    snap = Snapshot.zeros(grid)
    snap.U.plus[5] = np.cos(k * grid.x2)[None, :]
    snap.U.minus[5] = np.cos(k * grid.x2)[None, :]
    snap.phi = FrontState(np.cos(k * grid.x2))
    res = solver.run(basic, eps, initial=snap, report_every=max(grid.n_steps, 1))
    T = grid.T_final
    exact_line = np.cos(k * (grid.x2 - v2 * T))
    errS = solver._weighted_l2(res.final.U.plus[5] - exact_line[None, :], grid)
    err_other = max(
        float(np.max(np.abs(res.final.U.plus[:5]))),
        float(np.max(np.abs(res.final.U.minus[:5]))),
    )
    errphi = float(np.max(np.abs(res.final.phi.phi - exact_line)))
    return max(errS, errphi, err_other)


def run_neutral_mode(cfg: ScenarioConfig) -> ScenarioResult:
    pair_cfg = dict(cfg.values)
    # analytic residual via the spectral module
    gamma = cfg["physics.gamma"]

    def st(S):
        return mhd.PlasmaState(cfg["state.p"], 0.0, cfg["state.v2"],
                               cfg["state.H1"], cfg["state.H2"], S, gamma=gamma)

    pair = spectral.ContactPair(st(cfg["state.S_plus"]), st(cfg["state.S_minus"]))
    analytic = spectral.neutral_mode_residual(float(cfg["neutral.omega2"]), pair)
    refinements = cfg["neutral.refinements"]
    errs = [neutral_mode_discrete_error(N, cfg) for N in refinements]
    hs = [1.0 / (N - 1) for N in refinements]
    slope = _fit_order(hs, errs)
    ok = analytic == 0.0 and slope >= 1.9
    lines = ["N,h,error"] + [
        f"{N},{h:.8e},{e:.8e}" for N, h, e in zip(refinements, hs, errs)
    ]
    report = [
        f"analytic neutral-mode residual: {analytic:.3e}",
        "discrete errors: " + ", ".join(f"{e:.3e}" for e in errs),
        f"refinement slope: {slope:.3f} (need >= 1.9)",
        f"overall: {'PASS' if ok else 'FAIL'}",
    ]
    return ScenarioResult(ok=ok, exit_code=0 if ok else 1, report=report,
                          csv={"neutral_mode.csv": lines},
                          data={"analytic": analytic, "slope": slope, "errors": errs})


def run_rt(cfg: ScenarioConfig) -> ScenarioResult:
    eps = cfg["run.epsilon"]
    grid = grid_from_config(cfg, rt_state_from_config, epsilon=eps)
    basic = rt_state_from_config(cfg, grid)
    sources = make_forcing(grid, cfg["run.seed"], cfg["forcing.amplitude"],
                           cfg["forcing.t_ramp"], cfg["forcing.k2"])
    res = solver.run(basic, eps, sources=sources,
                     report_every=cfg["run.report_every"],
                     store_snapshots_every=cfg["run.snapshot_every"])
    if res.blew_up:
        return ScenarioResult(ok=False, exit_code=3,
                              report=[f"blow-up at t = {res.blowup_time:.6g}"],
                              csv={"timeseries.csv": res.csv_lines()})
    # normalization: discrete H1 norm of the interior source plus the
    # interior source induced by lifting the interface data
    times = np.linspace(0.0, grid.T_final, min(grid.n_steps + 1, 33))
    f_norm = source_h1_norm(sources.f, grid, times)
    lift = solver.lift_boundary_data(sources.g, grid, basic, epsilon=eps)
    lift.front_lift(times)
    F_norm = lift.source_h1_norm(times)
    total = f_norm + F_norm
    ratio = res.J_max / total ** 2 if total > 0 else float("inf")
    report = [
        f"grid {grid.N1}x{grid.N2}, eps={eps}, rt_jump={cfg['state.rt_jump']}",
        f"sup_t J = {res.J_max:.6e}",
        f"source H1 norms: f {f_norm:.6e}, lifted-g {F_norm:.6e}",
        f"normalized ratio sup J / ||F||^2 = {ratio:.6e}",
        "overall: PASS",
    ]
    snaps = [("final", res.final, grid)]
    return ScenarioResult(ok=True, exit_code=0, report=report,
                          csv={"timeseries.csv": res.csv_lines()},
                          snapshots=snaps,
                          data={"J_max": res.J_max, "ratio": ratio,
                                "reports": res.reports})


def run_eps_sweep(cfg: ScenarioConfig) -> ScenarioResult:
    eps_list = cfg["sweep.eps_list"]
    grid = grid_from_config(cfg, rt_state_from_config, epsilon=max(eps_list))
    basic = rt_state_from_config(cfg, grid)
    sources = make_forcing(grid, cfg["run.seed"], cfg["forcing.amplitude"],
                           cfg["forcing.t_ramp"], cfg["forcing.k2"])
    result = solver.eps_sweep(basic, eps_list, sources=sources)
    ok = (
        not result.truncated
        and len(result.J_max) == len(eps_list)
        and bool(np.all(np.isfinite(result.J_max)))
        and all(r <= 0.9 for r in result.ratios)
    )
    report = [
        "eps sweep over " + ", ".join(f"{e:g}" for e in eps_list),
        "successive differences: " + ", ".join(f"{d:.6e}" for d in result.diffs),
        "ratios: " + ", ".join(f"{r:.3f}" for r in result.ratios),
        "J_max per eps: " + ", ".join(f"{j:.6e}" for j in result.J_max),
        "trace bound ||eps f7+|_0||: " + ", ".join(f"{t:.6e}" for t in result.trace_bound),
        f"truncated by blow-up: {'yes' if result.truncated else 'no'}",
        f"overall: {'PASS' if ok else 'FAIL'}",
    ]
    code = 3 if result.truncated else (0 if ok else 1)
    return ScenarioResult(ok=bool(ok), exit_code=code, report=report,
                          csv={"eps_sweep.csv": result.table_lines()},
                          data={"result": result})


def run_adjoint_check(cfg: ScenarioConfig) -> ScenarioResult:
    grid = Grid(cfg["grid.N1"], cfg["grid.N2"], cfg["grid.X1"], cfg["grid.X2"])
    basic = constant_state_from_config(cfg, grid)
    defect = solver.discrete_adjoint_check(
        basic, cfg["run.epsilon"], trials=cfg["adjoint.trials"], seed=cfg["run.seed"],
    )
    tol = cfg["tolerance.adjoint"]
    ok = defect <= tol
    report = [
        f"max relative duality defect over {cfg['adjoint.trials']} trials: {defect:.3e}",
        f"tolerance: {tol:g}",
        f"overall: {'PASS' if ok else 'FAIL'}",
    ]
    return ScenarioResult(ok=ok, exit_code=0 if ok else 1, report=report,
                          data={"defect": defect})


def run_mms(cfg: ScenarioConfig) -> ScenarioResult:
    problem = mms_problem_from_config(cfg)
    refinements = cfg["mms.refinements"]
    errs = []
    divs = []
    hs = []
    try:
        for N in refinements:
            sub = dict(cfg.values)
            sub["grid.N1"], sub["grid.N2"] = N, N
            scfg = ScenarioConfig(kind=cfg.kind, values=sub, raw=cfg.raw)
            grid = grid_from_config(scfg, constant_state_from_config,
                                    epsilon=cfg["run.epsilon"])
            basic = constant_state_from_config(scfg, grid)
            err, div = problem.run_error(grid, basic)
            errs.append(err)
            divs.append(div)
            hs.append(grid.h1)
    except solver.BlowUpError as exc:
        return ScenarioResult(ok=False, exit_code=3,
                              report=[f"blow-up at t = {exc.t:.6g}"])
    order = _fit_order(hs, errs)
    div_slope = _fit_order(hs, divs) if min(divs) > 0 else float("inf")
    ok = 1.8 <= order <= 2.2 and div_slope >= 0.9
    lines = ["N,h,rel_error,div_defect"] + [
        f"{N},{h:.8e},{e:.8e},{d:.8e}"
        for N, h, e, d in zip(refinements, hs, errs, divs)
    ]
    report = [
        "manufactured-solution errors: " + ", ".join(f"{e:.4e}" for e in errs),
        f"space-time L2 order: {order:.3f} (window [1.8, 2.2])",
        "divergence defects: " + ", ".join(f"{d:.4e}" for d in divs),
        f"divergence defect slope: {div_slope:.3f} (need >= 0.9)",
        f"overall: {'PASS' if ok else 'FAIL'}",
    ]
    return ScenarioResult(ok=ok, exit_code=0 if ok else 1, report=report,
                          csv={"mms.csv": lines},
                          data={"order": order, "div_slope": div_slope,
                                "errors": errs, "div_defects": divs})


RUNNERS = {
    "validate-state": run_validate_state,
    "spectrum": run_spectrum,
    "energy-test": run_energy_test,
    "neutral-mode": run_neutral_mode,
    "rt-run": run_rt,
    "eps-sweep": run_eps_sweep,
    "adjoint-check": run_adjoint_check,
    "mms": run_mms,
}
