import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def smooth_state_2d(x, y):
    """A smooth, strictly admissible primitive field used by several tests."""
    rho = 1.0 + 0.2 * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y)
    u = 0.3 + 0.1 * np.cos(2 * np.pi * y)
    v = -0.2 + 0.1 * np.sin(2 * np.pi * x)
    p = 1.0 + 0.1 * np.cos(2 * np.pi * (x + y))
    return np.stack([rho, u, v, p])
