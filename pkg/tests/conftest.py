import numpy as np
import pytest
from hypothesis import strategies as st

from contact_stab import mhd


def admissible_states(max_speed: float = 3.0):
    """Random hyperbolic states with moderate magnitudes."""
    return st.builds(
        mhd.PlasmaState,
        p=st.floats(0.05, 10.0),
        v1=st.floats(-max_speed, max_speed),
        v2=st.floats(-max_speed, max_speed),
        H1=st.floats(-3.0, 3.0),
        H2=st.floats(-3.0, 3.0),
        S=st.floats(-2.0, 2.0),
    )


def boundary_traces():
    """Interface background data with |H_N| >= 0.1 and bounded front slope."""
    from contact_stab.linearization import BoundaryTrace

    def build(H2, d2phi, hn, sign):
        # choose H1 so the normal component is exactly sign * hn
        return BoundaryTrace(H1=sign * hn + H2 * d2phi, H2=H2, d2phi=d2phi)

    return st.builds(
        build,
        H2=st.floats(-3.0, 3.0),
        d2phi=st.floats(-0.9, 0.9),
        hn=st.floats(0.1, 3.0),
        sign=st.sampled_from([-1.0, 1.0]),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_grid():
    from contact_stab.grid import Grid

    return Grid(24, 16, 6.0, 2.0 * np.pi)
