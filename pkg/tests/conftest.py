import numpy as np
import pytest

from hermflow.catalog import instantiate
from hermflow.invariant import MetricCoefficients


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def unit_metric():
    return MetricCoefficients(1.0, 1.0, 1.0)


@pytest.fixture
def iwasawa():
    return instantiate("Np", rho=1)


@pytest.fixture
def torus():
    return instantiate("Np", rho=0)


def random_point(rng, n, rmin=0.5, rmax=1.5):
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z * rng.uniform(rmin, rmax) / np.linalg.norm(z)
