import math

import numpy as np
import pytest
from hypothesis import strategies as st

from pointspec import CharacteristicParams, u_from_params

angles = st.floats(min_value=0.0, max_value=2 * math.pi, allow_nan=False, exclude_max=True)


def random_unitary(rng: np.random.Generator, l0: float = 1.0):
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    xi = rng.uniform(0.0, math.pi)
    return u_from_params(CharacteristicParams(xi, *v), l0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)
