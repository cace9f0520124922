import numpy as np
import pytest

from gpe_echo import Wavefunction, make_grid, normalize


@pytest.fixture
def grid256():
    return make_grid(40.0, 256)


@pytest.fixture
def grid512():
    return make_grid(40.0, 512)


def gaussian_state(grid, center=0.0, sigma=1.0, momentum=0.0):
    """Unit-norm Gaussian wavepacket on `grid`."""
    z = grid.nodes
    a = np.exp(-((z - center) ** 2) / (2 * sigma**2) + 1j * momentum * z)
    return normalize(Wavefunction(grid, a))


def random_state(grid, seed):
    """Unit-norm state with i.i.d. complex normal amplitudes."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=grid.points) + 1j * rng.normal(size=grid.points)
    return normalize(Wavefunction(grid, a))
