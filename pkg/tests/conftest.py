import numpy as np
import pytest

from gpshadow.grid import build_grid


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def grid_1d_small():
    # [0, 2], 8 interior nodes
    return build_grid((0.0, 2.0), 10)


@pytest.fixture
def grid_2d_small():
    # [-2, 2]^2, 9x9 interior nodes
    return build_grid(((-2.0, 2.0), (-2.0, 2.0)), 11)


def random_field(grid, rng):
    return rng.standard_normal(grid.m) + 1j * rng.standard_normal(grid.m)
