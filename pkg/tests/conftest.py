import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hamapsp import BitMatrix

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def bitmatrices(draw, max_rows=12, max_cols=70, min_rows=1, square=False):
    rows = draw(st.integers(min_rows, max_rows))
    cols = rows if square else draw(st.integers(1, max_cols))
    density = draw(st.sampled_from([0.0, 0.1, 0.5, 0.9, 1.0]))
    seed = draw(st.integers(0, 2**32 - 1))
    return BitMatrix.random(rows, cols, density, np.random.default_rng(seed))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_scalar(rng, rows, cols, inf_frac=0.1, ties=False):
    A = rng.integers(0, 5, (rows, cols)).astype(float) if ties else rng.uniform(0, 10, (rows, cols))
    A[rng.random((rows, cols)) < inf_frac] = np.inf
    return A
