import numpy as np
import pytest

from bohm_moyal import build_grid, gaussian


@pytest.fixture(scope="session")
def grid():
    return build_grid(256, 40.0)


@pytest.fixture(scope="session")
def g021(grid):
    """G(x0=0, p0=2, sigma=1)."""
    return gaussian(grid, 0.0, 2.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def well_conditioned(rho, frac=1e-6):
    return rho > frac * rho.max()
