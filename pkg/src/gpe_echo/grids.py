"""Uniform periodic 1D grids and the fields living on them.

All quantities are dimensionless: lengths in units of the harmonic-oscillator
length L_ho, wavenumbers in 1/L_ho. Quadrature is the rectangle rule, which
is exact for periodic band-limited integrands on a uniform grid.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError


@dataclass(frozen=True, eq=False)
class Grid:
    """Periodic spatial lattice and its conjugate wavenumber lattice."""

    length: float
    points: int
    spacing: float
    nodes: np.ndarray
    wavenumbers: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self.length == other.length and self.points == other.points

    def __repr__(self):
        return f"Grid(length={self.length}, points={self.points})"


def make_grid(length, points):
    """Build a Grid of `points` nodes spanning [-length/2, length/2).

    `points` must be a power of two >= 16; with dyadic point counts the
    identity spacing * points == length holds exactly in floating point.
    """
    if not length > 0:
        raise ValueError(f"grid length must be positive, got {length}")
    if points < 16 or (points & (points - 1)) != 0:
        raise ValueError(f"grid points must be a power of two >= 16, got {points}")
    length = float(length)
    spacing = length / points
    nodes = -length / 2 + spacing * np.arange(points)
    wavenumbers = 2 * np.pi * np.fft.fftfreq(points, d=spacing)
    nodes.setflags(write=False)
    wavenumbers.setflags(write=False)
    return Grid(length, points, spacing, nodes, wavenumbers)


@dataclass
class Wavefunction:
    """Complex amplitude field psi(z_i) on a Grid, normally unit L2 norm."""

    grid: Grid
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.grid.points,):
            raise ValueError(
                f"amplitudes shape {self.amplitudes.shape} does not match "
                f"grid with {self.grid.points} points"
            )

    def copy(self):
        return Wavefunction(self.grid, self.amplitudes.copy())


@dataclass
class PotentialField:
    """Real scalar field on a Grid, in units of hbar*omega_z."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.points,):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"grid with {self.grid.points} points"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("potential contains non-finite values")

    def __add__(self, other):
        require_same_grid(self, other)
        return PotentialField(self.grid, self.values + other.values)


def require_same_grid(a, b):
    """Raise GridMismatchError unless the two fields share a grid."""
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")


def normalize(psi):
    """Return a unit-norm copy of `psi`."""
    n = quadrature_norm(psi)
    if n == 0:
        raise ValueError("cannot normalize an all-zero field")
    return Wavefunction(psi.grid, psi.amplitudes / n)


def quadrature_norm(psi):
    """L2 norm sqrt(sum |psi_i|^2 * spacing)."""
    a = psi.amplitudes
    return float(np.sqrt(np.sum(a.real**2 + a.imag**2) * psi.grid.spacing))


def inner_product(a, b):
    """<a|b> = sum conj(a_i) b_i * spacing on the shared grid."""
    require_same_grid(a, b)
    return complex(np.sum(np.conj(a.amplitudes) * b.amplitudes) * a.grid.spacing)


def expectation_position(psi):
    """<z> = sum z_i |psi_i|^2 * spacing, for a unit-norm state."""
    a = psi.amplitudes
    dens = a.real**2 + a.imag**2
    return float(np.sum(psi.grid.nodes * dens) * psi.grid.spacing)
