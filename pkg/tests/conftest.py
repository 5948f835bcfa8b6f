import numpy as np
import pytest

from entcoh.catalog import bell, rho2


def h2(p):
    """Binary entropy in bits."""
    p = np.clip(p, 1e-300, 1.0)
    q = np.clip(1 - p, 1e-300, 1.0)
    return float(-(p * np.log2(p) + q * np.log2(q)))


@pytest.fixture
def psi_plus():
    return bell("bell_psi+")


@pytest.fixture
def rho2_075():
    return rho2(0.75)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
