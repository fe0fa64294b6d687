import numpy as np
import pytest

from expbergman.kernel import kernel_moments
from expbergman.quadrature import disk_grid
from expbergman.weights import estimate_m_tau, make_weight


@pytest.fixture(scope="session")
def w():
    return make_weight(0.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def m_tau(w):
    return estimate_m_tau(w)


@pytest.fixture(scope="session")
def grid(w):
    """Working grid for polynomial norms and kernels with |z| <= 0.8."""
    return disk_grid(w, 400, 256)


@pytest.fixture(scope="session")
def grid_fine(w):
    """Grid with enough angles for kernels up to |z| = 0.9."""
    return disk_grid(w, 400, 1024)


@pytest.fixture(scope="session")
def m128(w):
    return kernel_moments(w, 128)


@pytest.fixture(scope="session")
def m640(w):
    return kernel_moments(w, 640)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
