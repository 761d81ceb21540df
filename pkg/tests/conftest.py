import numpy as np
import pytest

from msfield.fields import PhysicalParams
from msfield.spectral import SpectralGrid

TWO_PI = 2.0 * np.pi


@pytest.fixture
def grid3():
    return SpectralGrid(16, TWO_PI, 3)


@pytest.fixture
def grid3_small():
    return SpectralGrid(8, TWO_PI, 3)


@pytest.fixture
def grid6_small():
    return SpectralGrid(8, TWO_PI, 6)


@pytest.fixture
def one_particle():
    return PhysicalParams(hbar=1.0, c=10.0, masses=(1.0,), charges=(0.5,))


@pytest.fixture
def neutral_particle():
    return PhysicalParams(hbar=1.0, c=10.0, masses=(1.0,), charges=(0.0,))


@pytest.fixture
def two_particles():
    return PhysicalParams(hbar=1.0, c=10.0, masses=(1.0, 1.0), charges=(0.5, 0.5))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
