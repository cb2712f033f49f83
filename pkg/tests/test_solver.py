import numpy as np
import pytest

from contact_stab import solver
from contact_stab.fields import FrontState, TwoSidedField
from contact_stab.grid import Grid, d1_field
from contact_stab.linearization import bc_residual, constant_basic_state
from contact_stab.solver import (
    BlowUpError,
    Snapshot,
    Sources,
    assemble_coefficients,
    build_grid,
    discrete_adjoint_check,
    divergence_free_pulse,
    divergence_monitor,
    energy_report,
    eps_sweep,
    g_norm_h32,
    lift_boundary_data,
    run,
    speed_bound,
    step,
    symmetrizer_energy,
)


def small_basic(N1=20, N2=16, v2=0.2, T=0.2, eps=1e-2):
    grid = build_grid(N1, N2, 4.0, 2.0 * np.pi, T,
                      basic=constant_basic_state(Grid(N1, N2, 4.0, 2.0 * np.pi), v2=v2),
                      epsilon=eps)
    return constant_basic_state(grid, v2=v2, H1=1.0, H2=0.3,
                                S_plus=0.2, S_minus=-0.1), grid


class TestGridBuild:
    def test_cfl_satisfied_and_steps_divide_horizon(self):
        basic, grid = small_basic()
        s = speed_bound(basic, 1e-2)
        assert grid.dt * s <= 0.4 * min(grid.h1, grid.h2) + 1e-14
        assert grid.n_steps * grid.dt == pytest.approx(grid.T_final)

    def test_epsilon_enters_the_speed_bound(self):
        basic, _ = small_basic()
        assert speed_bound(basic, 0.5) >= speed_bound(basic, 0.0)

    def test_impossible_cfl_rejected(self):
        with pytest.raises(ValueError):
            solver.build_grid(8, 8, 1.0, 1.0, 1.0, speed=-1.0, cfl_max=-0.4)


class TestSummationByParts:
    def test_first_derivative_matrix_is_exactly_sbp(self):
        g = Grid(17, 8, 2.0, 1.0)
        N = g.N1
        D = np.zeros((N, N))
        for j in range(N):
            e = np.zeros((1, N, 1))
            e[0, j, 0] = 1.0
            D[:, j] = d1_field(e, g.h1)[0, :, 0]
        P = np.diag(g.p_weights1)
        Q = P @ D + D.T @ P
        B = np.zeros((N, N))
        B[0, 0], B[-1, -1] = -1.0, 1.0
        assert np.max(np.abs(Q - B)) <= 1e-14


class TestStep:
    def test_zero_data_stays_exactly_zero(self):
        basic, grid = small_basic()
        snap = Snapshot.zeros(grid)
        for _ in range(5):
            snap = step(snap, basic, 1e-2)
        assert np.all(snap.U.plus == 0.0)
        assert np.all(snap.U.minus == 0.0)
        assert np.all(snap.phi.phi == 0.0)

    def test_scheme_is_linear_in_the_data(self):
        basic, grid = small_basic()
        a = divergence_free_pulse(grid, seed=1)
        b = divergence_free_pulse(grid, seed=2)
        combo = Snapshot(
            U=TwoSidedField(2.0 * a.U.plus - 0.5 * b.U.plus,
                            2.0 * a.U.minus - 0.5 * b.U.minus),
            phi=FrontState(2.0 * a.phi.phi - 0.5 * b.phi.phi),
            t=0.0,
            a_plus=2.0 * a.a_plus - 0.5 * b.a_plus,
            a_minus=2.0 * a.a_minus - 0.5 * b.a_minus,
        )
        coeffs = assemble_coefficients(basic)
        sa = step(a, basic, 1e-2, coeffs=coeffs)
        sb = step(b, basic, 1e-2, coeffs=coeffs)
        sc = step(combo, basic, 1e-2, coeffs=coeffs)
        want = 2.0 * sa.U.plus - 0.5 * sb.U.plus
        scale = max(np.max(np.abs(want)), 1.0)
        assert np.max(np.abs(sc.U.plus - want)) <= 1e-12 * scale

    def test_nan_triggers_blow_up_signal(self):
        basic, grid = small_basic()
        snap = Snapshot.zeros(grid)
        snap.U.plus[0, 3, 4] = np.nan
        with pytest.raises(BlowUpError):
            step(snap, basic, 1e-2)

    def test_run_reports_blow_up_with_partial_series(self):
        basic, grid = small_basic()
        snap = Snapshot.zeros(grid)
        snap.U.plus[0, 3, 4] = 1e308  # overflows within a few steps
        res = run(basic, 1e-2, initial=snap)
        assert res.blew_up
        assert res.blowup_time is not None
        assert len(res.reports) >= 1


class TestEnergyReport:
    def test_zero_snapshot_all_zero(self):
        basic, grid = small_basic()
        rep = energy_report(Snapshot.zeros(grid), basic)
        assert rep.I_plus == 0.0 and rep.I_minus == 0.0 and rep.J == 0.0
        assert rep.Q_boundary == 0.0

    def test_j_dominates_the_side_energies(self):
        basic, grid = small_basic()
        snap = divergence_free_pulse(grid, seed=4)
        snap.phi = FrontState(0.1 * np.cos(grid.x2))
        rep = energy_report(snap, basic)
        assert rep.J >= rep.I_plus + rep.I_minus

    def test_single_fourier_mode_matches_closed_form(self):
        basic, grid = small_basic(N1=30, N2=32)
        snap = Snapshot.zeros(grid)
        k = 3
        snap.U.plus[5] = np.sin(k * grid.x2)[None, :]
        rep = energy_report(snap, basic)
        area = grid.X1 * grid.X2
        keff = np.sin(k * grid.h2) / grid.h2  # discrete derivative symbol
        want = 0.5 * area * (1.0 + keff ** 2)
        assert rep.I_plus == pytest.approx(want, rel=1e-12)

    def test_csv_row_shape(self):
        basic, grid = small_basic()
        rep = energy_report(Snapshot.zeros(grid), basic)
        assert len(rep.csv_row().split(",")) == len(rep.CSV_HEADER.split(","))


class TestDivergence:
    def test_streamfunction_pulse_is_discretely_divergence_free(self):
        basic, grid = small_basic()
        snap = divergence_free_pulse(grid, seed=9)
        dp, dm = divergence_monitor(snap, basic)
        assert dp <= 1e-11 and dm <= 1e-11

    def test_defect_tracks_injected_divergence(self):
        basic, grid = small_basic()
        snap = divergence_free_pulse(grid, seed=9)
        snap.U.plus[3] += 0.5 * np.exp(-(grid.x1[:, None] - 2.0) ** 2)
        dp, _ = divergence_monitor(snap, basic)
        assert dp > 1e-3


class TestEnergyDecay:
    def test_symmetrizer_energy_nonincreasing_homogeneous(self):
        basic, grid = small_basic(N1=40, N2=40, T=0.3, eps=1e-3)
        coeffs = assemble_coefficients(basic)
        snap = divergence_free_pulse(grid, seed=3)
        solver.apply_interface_conditions(snap.U, snap.phi.phi, coeffs, None)
        E = [symmetrizer_energy(snap, basic, coeffs)]
        for _ in range(grid.n_steps):
            snap = step(snap, basic, 1e-3, coeffs=coeffs)
            E.append(symmetrizer_energy(snap, basic, coeffs))
        E = np.array(E)
        assert np.max(E) <= E[0] * (1.0 + 1e-6)


class TestAdjoint:
    def test_defect_at_machine_precision(self):
        basic, _ = small_basic(N1=16, N2=12)
        for eps in (0.0, 1e-2, 0.1):
            assert discrete_adjoint_check(basic, eps, trials=4, seed=2) <= 1e-12


class TestLift:
    def test_zero_data_zero_lift(self):
        basic, grid = small_basic()
        lift = lift_boundary_data(lambda t: np.zeros((5, grid.N2)), grid, basic)
        U = lift.u_tilde(0.3)
        assert np.all(U.plus == 0.0) and np.all(U.minus == 0.0)

    def test_plus_side_carries_the_jump(self):
        basic, grid = small_basic(v2=0.0)

        def g(t):
            rows = np.zeros((5, grid.N2))
            rows[1] = np.cos(grid.x2)  # only the v1 jump
            return rows

        lift = lift_boundary_data(g, grid, basic)
        U = lift.u_tilde(0.0)
        assert np.all(U.minus == 0.0)
        assert np.allclose(U.plus[1, 0, :], np.cos(grid.x2))
        # decay profile in x1
        assert np.all(np.abs(U.plus[1, -1, :]) < np.abs(U.plus[1, 0, :]))

    def test_lifted_traces_satisfy_the_interface_rows(self):
        basic, grid = small_basic(v2=0.0, T=0.2)

        def g(t):
            rows = np.zeros((5, grid.N2))
            rows[0] = 0.3 * np.sin(grid.x2) * np.sin(t)
            rows[1] = 0.2 * np.cos(grid.x2) * np.sin(t)
            rows[3] = 0.1 * np.cos(2 * grid.x2) * np.sin(t)
            return rows

        lift = lift_boundary_data(g, grid, basic)
        times = np.linspace(0.0, grid.T_final, grid.n_steps + 1)
        phis = lift.front_lift(times)
        n = len(times) // 2
        t = times[n]
        U = lift.u_tilde(t)
        dt_phi = (phis[n + 1] - phis[n - 1]) / (2 * (times[1] - times[0]))
        res = bc_residual(U.plus[:, 0, :], U.minus[:, 0, :],
                          FrontState(phis[n]), basic, dt_phi=dt_phi,
                          g_rows=g(t))
        # jump rows are satisfied exactly; the front row to ODE accuracy
        assert np.max(np.abs(res[:4])) <= 1e-12
        assert np.max(np.abs(res[4])) <= 5e-3

    def test_induced_source_norm_finite_and_scales(self):
        basic, grid = small_basic(v2=0.0, T=0.2)

        def g_of(a):
            def g(t):
                rows = np.zeros((5, grid.N2))
                rows[1] = a * np.cos(grid.x2) * np.sin(t)
                return rows
            return g

        times = np.linspace(0.0, grid.T_final, 9)
        n1 = lift_boundary_data(g_of(1.0), grid, basic).source_h1_norm(times)
        n2 = lift_boundary_data(g_of(2.0), grid, basic).source_h1_norm(times)
        assert np.isfinite(n1) and n1 > 0.0
        assert n2 == pytest.approx(2.0 * n1, rel=1e-8)


class TestBoundaryNormSurrogate:
    def test_linear_scaling_and_positivity(self, rng):
        g = rng.standard_normal((8, 5, 16))
        n1 = g_norm_h32(g, 0.1, 0.3)
        n2 = g_norm_h32(3.0 * g, 0.1, 0.3)
        assert n1 > 0.0
        assert n2 == pytest.approx(3.0 * n1, rel=1e-10)

    def test_rougher_data_has_larger_norm(self):
        x2 = np.arange(32) * (2 * np.pi / 32)
        smooth = np.zeros((4, 5, 32))
        rough = np.zeros((4, 5, 32))
        smooth[:, 0] = np.cos(x2)
        rough[:, 0] = np.cos(8 * x2)
        assert g_norm_h32(rough, 0.1, x2[1]) > g_norm_h32(smooth, 0.1, x2[1])


class TestEpsSweep:
    def test_requires_decreasing_list(self):
        basic, _ = small_basic()
        with pytest.raises(ValueError):
            eps_sweep(basic, [0.1, 0.1])

    def test_zero_sources_give_zero_differences(self):
        basic, grid = small_basic(T=0.1)
        res = eps_sweep(basic, [0.1, 0.05], sources=None)
        assert res.diffs == [0.0]
        assert not res.truncated
        lines = res.table_lines()
        assert lines[0].startswith("eps,")
        assert len(lines) == 3
