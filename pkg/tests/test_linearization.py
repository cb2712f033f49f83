import numpy as np
import pytest
from hypothesis import given, settings

from contact_stab import mhd
from contact_stab.fields import FrontState, TwoSidedField
from contact_stab.geometry import build_lifted_geometry
from contact_stab.grid import Grid, d1_field, d2_field
from contact_stab.linearization import (
    BoundaryTrace,
    apply_linearized_operator,
    assemble_A1_tilde,
    basic_state_from_arrays,
    bc_residual,
    boundary_A1_exact,
    boundary_quadratic_form,
    boundary_signature,
    constant_basic_state,
    first_variation,
    good_unknown,
    good_unknown_inverse,
    two_sided_signature,
    validate_basic_state,
    w_congruence_check,
)

from conftest import boundary_traces


def curved_background(grid, v2=0.4, H1=1.0, H2=0.3, p=1.2, amp=0.3):
    """Smooth background with a curved front that satisfies the kinematic
    condition: the velocity is tangent to the level sets of the lift, so
    the transport field vanishes identically."""
    phi_hat = amp * np.cos(grid.x2)
    geo = build_lifted_geometry(FrontState(phi_hat), grid)
    shape = (6, grid.N1, grid.N2)
    up, um = np.zeros(shape), np.zeros(shape)
    for arr, side in ((up, +1), (um, -1)):
        d2psi = geo.side("d2_psi", side)
        arr[0] = p
        arr[1] = v2 * d2psi
        arr[2] = v2
        arr[3] = H1
        arr[4] = H2
        arr[5] = 0.1 * side
    return basic_state_from_arrays(grid, up, um, phi_hat=phi_hat)


class TestBoundaryAlgebra:
    @given(boundary_traces())
    @settings(max_examples=100)
    def test_congruence_defect_below_1e12(self, trace):
        assert w_congruence_check(trace, +1) <= 1e-12
        assert w_congruence_check(trace, -1) <= 1e-12

    @given(boundary_traces())
    @settings(max_examples=100)
    def test_signatures(self, trace):
        assert boundary_signature(trace, +1) == (2, 2, 2)
        assert boundary_signature(trace, -1) == (2, 2, 2)
        assert two_sided_signature(trace) == (4, 4, 4)

    def test_exact_boundary_matrix_structure(self):
        tr = BoundaryTrace(H1=1.0, H2=0.5, d2phi=0.2)
        M = boundary_A1_exact(tr, +1)
        assert np.array_equal(M, M.T)
        assert np.all(M[5, :] == 0.0) and np.all(M[:, 5] == 0.0)
        assert np.array_equal(boundary_A1_exact(tr, -1), -M)

    def test_effective_matrix_reduces_to_exact_form_on_the_interface(self):
        grid = Grid(48, 32, 6.0, 2.0 * np.pi)
        basic = curved_background(grid)
        d2phi = basic.geometry.d2_phi_boundary
        worst = 0.0
        for side in (+1, -1):
            At = assemble_A1_tilde(basic, side)
            for i2 in range(0, grid.N2, 5):
                tr = BoundaryTrace(
                    H1=basic.u.plus[3, 0, i2], H2=basic.u.plus[4, 0, i2],
                    d2phi=float(d2phi[i2]),
                )
                worst = max(worst, float(np.max(np.abs(
                    At[:, :, 0, i2] - boundary_A1_exact(tr, side)
                ))))
        assert worst <= 1e-12


class TestGoodUnknown:
    def test_round_trip_exact(self, rng):
        grid = Grid(24, 16, 6.0, 2.0 * np.pi)
        basic = curved_background(grid)
        U = rng.standard_normal((6, grid.N1, grid.N2))
        psi = rng.standard_normal((grid.N1, grid.N2))
        dot = good_unknown(U, psi, basic, +1)
        back = good_unknown_inverse(dot, psi, basic, +1)
        assert np.max(np.abs(back - U)) <= 1e-12

    def test_identity_for_constant_background(self, rng):
        grid = Grid(24, 16, 6.0, 2.0 * np.pi)
        basic = constant_basic_state(grid)
        U = rng.standard_normal((6, grid.N1, grid.N2))
        psi = rng.standard_normal((grid.N1, grid.N2))
        assert np.array_equal(good_unknown(U, psi, basic, +1), U)


def nonlinear_interior_residual(u_field, front, grid, side, gamma=mhd.GAMMA_DEFAULT):
    """Static interior residual of the straightened quasilinear system."""
    geo = build_lifted_geometry(front, grid, skip_admissibility=True)
    rho = mhd.eos_density(u_field[0], u_field[5], gamma)
    A0 = mhd.a0_matrix(u_field[0], rho, gamma)
    A1 = mhd.a1_matrix(u_field[0], u_field[1], u_field[3], u_field[4], rho, gamma)
    A2 = mhd.a2_matrix(u_field[0], u_field[2], u_field[3], u_field[4], rho, gamma)
    d1phi = geo.side("d1_phi", side)
    At1 = (A1 - A2 * geo.side("d2_psi", side)) / d1phi
    return (
        np.einsum("ij...,j...->i...", At1, d1_field(u_field, grid.h1))
        + np.einsum("ij...,j...->i...", A2, d2_field(u_field, grid.h2))
    )


class TestFirstVariation:
    def test_matches_finite_difference_of_the_nonlinear_operator(self):
        grid = Grid(32, 24, 6.0, 2.0 * np.pi)
        basic = curved_background(grid)
        rng = np.random.default_rng(5)
        X1g, X2g = grid.mesh()
        dU = np.stack([
            rng.uniform(0.3, 1.0) * np.exp(-X1g) * np.cos(X2g + rng.uniform(0, 6))
            for _ in range(6)
        ])
        dphi = 0.2 * np.sin(grid.x2)
        lin = first_variation(dU, dphi, basic, +1)
        errs = []
        eps_list = [1e-2, 1e-3, 1e-4]
        base = nonlinear_interior_residual(basic.u.plus, basic.phi_hat, grid, +1)
        for eps in eps_list:
            pert = nonlinear_interior_residual(
                basic.u.plus + eps * dU,
                FrontState(basic.phi_hat.phi + eps * dphi), grid, +1,
            )
            fd = (pert - base) / eps
            errs.append(np.max(np.abs(fd - lin)))
        slope = np.polyfit(np.log(eps_list), np.log(errs), 1)[0]
        assert slope >= 0.9


class TestInterfaceConditions:
    def test_zero_perturbation_zero_residual(self):
        grid = Grid(24, 16, 6.0, 2.0 * np.pi)
        basic = constant_basic_state(grid, v2=0.3)
        z6 = np.zeros((6, grid.N2))
        res = bc_residual(z6, z6, FrontState(np.zeros(grid.N2)), basic)
        assert np.max(np.abs(res)) == 0.0

    def test_front_row_sees_advection_and_normal_velocity(self):
        grid = Grid(24, 32, 6.0, 2.0 * np.pi)
        basic = constant_basic_state(grid, v2=0.5)
        phi = np.cos(grid.x2)
        z6 = np.zeros((6, grid.N2))
        tp = z6.copy()
        tp[1] = 0.7  # normal velocity trace feeds row 5 with a minus sign
        res = bc_residual(tp, z6, FrontState(phi), basic,
                          dt_phi=np.zeros(grid.N2))
        # rows 1-3 pick up the trace jump, row 5 combines advection and v_N
        assert np.allclose(res[1], 0.7)
        assert np.max(np.abs(res[4] - (-0.5 * np.sin(grid.x2) - 0.7))) <= 1e-2

    def test_quadratic_form_matrix_equals_closed_form(self, rng):
        grid = Grid(24, 16, 6.0, 2.0 * np.pi)
        basic = curved_background(grid)
        for _ in range(100):
            tp = rng.standard_normal((6, grid.N2))
            tm = rng.standard_normal((6, grid.N2))
            tm[1] = tp[1]
            tm[2] = tp[2]
            mat, closed = boundary_quadratic_form(tp, tm, basic)
            assert np.max(np.abs(mat - closed)) <= 1e-12 * max(1.0, np.max(np.abs(mat)))

    def test_quadratic_form_requires_continuous_velocity(self, rng):
        grid = Grid(24, 16, 6.0, 2.0 * np.pi)
        basic = constant_basic_state(grid)
        tp = rng.standard_normal((6, grid.N2))
        tm = tp + 1.0
        with pytest.raises(ValueError):
            boundary_quadratic_form(tp, tm, basic)


class TestValidation:
    def test_constant_contact_background_passes(self):
        grid = Grid(32, 24, 6.0, 2.0 * np.pi)
        basic = constant_basic_state(grid, v2=0.2, H1=1.0, H2=0.3,
                                     S_plus=0.2, S_minus=-0.1)
        report = validate_basic_state(basic)
        assert report.all_passed, "\n".join(report.lines())

    def test_static_curved_background_passes_up_to_stencil_error(self):
        # v = 0 with a curved front is exactly steady; the only nonzero
        # residual is the solenoidal check, where the lift differentiates
        # the front line with a higher-order stencil than the grid fields.
        residuals = []
        for N in (32, 64, 128):
            grid = Grid(N + 1, N, 6.0, 2.0 * np.pi)
            report = validate_basic_state(curved_background(grid, v2=0.0), tol=1e30)
            for check in report.checks:
                if check.name == "front_bound":
                    assert check.passed
                elif check.name != "solenoidal":
                    assert check.max_residual <= 1e-12, report.lines()
            residuals.append(report["solenoidal"].max_residual)
        # second-order decay of the stencil mismatch
        assert residuals[1] <= 0.4 * residuals[0]
        assert residuals[2] <= 0.4 * residuals[1]

    def test_vanishing_normal_field_detected(self):
        grid = Grid(24, 16, 6.0, 2.0 * np.pi)
        basic = constant_basic_state(grid, H1=0.0, H2=1.0)
        report = validate_basic_state(basic)
        assert not report["normal_field"].passed

    def test_interface_jump_detected(self):
        grid = Grid(24, 16, 6.0, 2.0 * np.pi)
        shape = (6, grid.N1, grid.N2)
        up, um = np.zeros(shape), np.zeros(shape)
        up[0], um[0] = 1.2, 1.0  # pressure jump across the interface
        up[3] = um[3] = 1.0
        basic = basic_state_from_arrays(grid, up, um)
        report = validate_basic_state(basic)
        assert not report["interface_continuity"].passed
        assert report["normal_field"].passed

    def test_positivity_violation_detected(self):
        grid = Grid(24, 16, 6.0, 2.0 * np.pi)
        basic = constant_basic_state(grid, p=5e-3)
        report = validate_basic_state(basic)
        assert not report["positivity"].passed


class TestLinearizedOperator:
    def test_zero_field_zero_residual(self):
        grid = Grid(24, 16, 6.0, 2.0 * np.pi)
        basic = curved_background(grid)
        z = np.zeros((6, grid.N1, grid.N2))
        assert np.max(np.abs(apply_linearized_operator(z, basic, +1))) == 0.0

    def test_zero_order_term_vanishes_on_constant_background(self, rng):
        grid = Grid(24, 16, 6.0, 2.0 * np.pi)
        basic = constant_basic_state(grid, v2=0.3, H2=0.4)
        U = np.broadcast_to(
            rng.standard_normal(6)[:, None, None], (6, grid.N1, grid.N2)
        ).copy()
        res = apply_linearized_operator(U, basic, +1)
        assert np.max(np.abs(res)) <= 1e-13
