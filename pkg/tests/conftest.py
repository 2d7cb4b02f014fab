import numpy as np
import pytest
from hypothesis import strategies as st


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def ball_vectors(n, rmax=0.95):
    """Hypothesis strategy for complex n-vectors inside the ball of radius ``rmax``."""
    comp = st.floats(-1, 1, allow_nan=False)
    return st.lists(st.tuples(comp, comp), min_size=n, max_size=n).map(
        lambda xs: _shrink(np.array([complex(a, b) for a, b in xs]), rmax)
    )


def _shrink(v, rmax):
    nrm = np.linalg.norm(v)
    return v if nrm < rmax else v * (rmax / (nrm + 1e-300))
