import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contact_stab import geometry
from contact_stab.fields import FrontState
from contact_stab.geometry import (
    AdmissibilityError,
    CHI_SLOPE_BOUND,
    build_lifted_geometry,
    cutoff_chi,
    cutoff_chi_d,
    cutoff_chi_dd,
    normal_jump,
)
from contact_stab.grid import Grid


class TestCutoff:
    def test_plateau_values(self):
        assert cutoff_chi(0.0) == 1.0
        assert cutoff_chi(1.0) == 1.0
        assert cutoff_chi(-0.7) == 1.0
        assert cutoff_chi(4.0) == 0.0
        assert cutoff_chi(6.0) == 0.0
        assert 0.0 < cutoff_chi(2.5) < 1.0

    def test_even_symmetry(self):
        x = np.linspace(-5, 5, 301)
        assert np.array_equal(cutoff_chi(x), cutoff_chi(-x))

    def test_slope_bound_strictly_below_half(self):
        x = np.linspace(-4.5, 4.5, 20001)
        m = np.max(np.abs(cutoff_chi_d(x)))
        assert m <= CHI_SLOPE_BOUND + 1e-12
        assert CHI_SLOPE_BOUND < 0.5

    def test_derivative_consistency(self):
        x = np.linspace(-4.5, 4.5, 1201)
        h = 1e-5
        fd = (cutoff_chi(x + h) - cutoff_chi(x - h)) / (2 * h)
        assert np.max(np.abs(fd - cutoff_chi_d(x))) <= 1e-6
        fd2 = (cutoff_chi_d(x + h) - cutoff_chi_d(x - h)) / (2 * h)
        assert np.max(np.abs(fd2 - cutoff_chi_dd(x))) <= 1e-5

    def test_monotone_on_transition(self):
        x = np.linspace(1.0, 4.0, 400)
        assert np.all(np.diff(cutoff_chi(x)) <= 1e-15)


class TestLiftedGeometry:
    def setup_method(self):
        self.grid = Grid(40, 24, 6.0, 2.0 * np.pi)

    def _front(self, amp=0.4):
        return FrontState(amp * np.cos(self.grid.x2))

    def test_map_slope_bounded_away_from_zero(self):
        geo = build_lifted_geometry(self._front(0.9), self.grid)
        assert np.min(geo.d1_phi_plus) >= 0.5
        assert np.max(geo.d1_phi_minus) <= -0.5

    def test_boundary_values(self):
        front = self._front()
        geo = build_lifted_geometry(front, self.grid)
        # chi = 1 near the interface: Psi restricted to x1 = 0 is phi itself
        assert np.allclose(geo.psi_plus[0], front.phi)
        assert np.allclose(geo.psi_minus[0], front.phi)
        assert np.allclose(geo.phi_map_plus[0], front.phi)
        assert np.allclose(geo.phi_map_minus[0], front.phi)

    def test_support_of_lift(self):
        geo = build_lifted_geometry(self._front(), self.grid)
        far = self.grid.x1 >= 4.0
        assert np.all(geo.psi_plus[far] == 0.0)
        assert np.all(geo.d1_phi_plus[far] == 1.0)

    def test_inadmissible_front_rejected(self):
        with pytest.raises(AdmissibilityError):
            build_lifted_geometry(self._front(1.0), self.grid)
        build_lifted_geometry(self._front(1.0), self.grid, skip_admissibility=True)

    def test_resolution_mismatch_rejected(self):
        with pytest.raises(ValueError):
            build_lifted_geometry(FrontState(np.zeros(7)), self.grid)

    @given(st.floats(-0.4, 0.4), st.floats(-0.4, 0.4),
           st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
    @settings(max_examples=25, deadline=None)
    def test_lift_is_linear_in_the_front(self, a1, a2, c1, c2):
        g = Grid(24, 16, 6.0, 2.0 * np.pi)
        pa = a1 * np.cos(g.x2)
        pb = a2 * np.sin(2 * g.x2)
        combo = c1 * pa + c2 * pb
        if np.max(np.abs(combo)) >= 1.0:
            return
        ga = build_lifted_geometry(FrontState(pa), g, skip_admissibility=True)
        gb = build_lifted_geometry(FrontState(pb), g, skip_admissibility=True)
        gc = build_lifted_geometry(FrontState(combo), g, skip_admissibility=True)
        got = gc.psi_plus
        want = c1 * ga.psi_plus + c2 * gb.psi_plus
        assert np.max(np.abs(got - want)) <= 1e-12 * max(1.0, np.max(np.abs(want)))

    def test_time_derivative_propagates_through_cutoff(self):
        front = self._front()
        dt_phi = 0.3 * np.sin(self.grid.x2)
        geo = build_lifted_geometry(front, self.grid, dt_phi=dt_phi)
        assert np.allclose(geo.dt_psi_plus[0], dt_phi)
        assert np.all(geo.dt_psi_plus[self.grid.x1 >= 4.0] == 0.0)


class TestNormalJump:
    def test_sum_convention_on_quadratics(self):
        g = Grid(30, 8, 3.0, 1.0)
        x1 = g.x1[:, None]
        sp, sm = 0.7, -0.2
        fp = 1.0 + sp * x1 + 0.4 * x1 ** 2 + np.zeros((1, g.N2))
        fm = 1.0 + sm * x1 - 0.1 * x1 ** 2 + np.zeros((1, g.N2))
        # the 2nd-order one-sided stencil is exact on quadratics
        got = normal_jump(fp, fm, g.h1)
        assert np.allclose(got, sp + sm, atol=1e-12)

    def test_components(self):
        assert geometry.normal_component(2.0, 3.0, 0.5) == pytest.approx(0.5)
        assert geometry.tangential_component(2.0, 3.0, 0.5) == pytest.approx(4.0)
