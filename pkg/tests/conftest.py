import numpy as np
import pytest

from wamalgam import (
    AxbGrid,
    AxbGroup,
    Euclidean,
    IntegerLattice,
    LatticeGrid,
    UniformGrid,
)


@pytest.fixture(scope="session")
def euclid():
    return Euclidean(1)


@pytest.fixture(scope="session")
def lattice():
    return IntegerLattice(1)


@pytest.fixture(scope="session")
def axb():
    return AxbGroup(1)


@pytest.fixture(scope="session")
def line_grid(euclid):
    return UniformGrid(euclid, -16.0, 16.0, 1024)


@pytest.fixture(scope="session")
def fine_line_grid(euclid):
    return UniformGrid(euclid, -4.0, 4.0, 8000)


@pytest.fixture(scope="session")
def z_grid(lattice):
    return LatticeGrid(lattice, -16, 16)


@pytest.fixture(scope="session")
def axb_grid(axb):
    return AxbGrid(axb, -6.0, 6.0, 80, 0.125, 8.0, 48)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
