import numpy as np
import pytest

from breather_lab.modal import Grid, mode_bases
from breather_lab.nehari import ModalSpace
from breather_lab.potential import validate_v1, validate_v2


@pytest.fixture(scope="session")
def v1():
    return validate_v1(1.0, 64.0)


@pytest.fixture(scope="session")
def v2():
    return validate_v2(1.0, 0.05)


@pytest.fixture(scope="session")
def small_v1(v1):
    """V1 bases on a short grid, k <= 5."""
    grid, bases = mode_bases(v1, 5, Grid.for_params(v1, 4, 32))
    return v1, grid, bases


@pytest.fixture(scope="session")
def small_v2(v2):
    grid, bases = mode_bases(v2, 5, Grid.for_params(v2, 4, 32))
    return v2, grid, bases


@pytest.fixture(scope="session")
def spaces(small_v1):
    params, grid, bases = small_v1
    return {s: ModalSpace(bases, grid, params.omega, 5, s) for s in (1, -1)}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
