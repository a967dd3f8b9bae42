import numpy as np
import pytest

from dcnls.grids import BoxField, BoxGrid, RadialField, RadialGrid


@pytest.fixture(scope="session")
def radial_grid():
    return RadialGrid(3, 20.0, 2048)


@pytest.fixture(scope="session")
def box_grid():
    return BoxGrid(3, 8.0, 32)


@pytest.fixture
def radial_gaussian(radial_grid):
    r = radial_grid.nodes
    return RadialField(radial_grid, np.exp(-(r**2) / 2.0).astype(complex))


@pytest.fixture
def box_gaussian(box_grid):
    xs = box_grid.coords()
    r2 = sum(x**2 for x in xs)
    return BoxField(box_grid, np.exp(-r2 / 2.0).astype(complex))


def random_box_field(grid, seed, width=1.0, amp=1.0):
    rng = np.random.default_rng(seed)
    xs = grid.coords()
    r2 = sum(x**2 for x in xs)
    envelope = np.exp(-r2 / (2.0 * width**2))
    shape = (grid.n,) * grid.d
    noise = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return BoxField(grid, amp * envelope * (1.0 + 0.1 * noise))
