"""Trap, speckle perturbation, coupling constant, and classical period.

Units: length in L_ho = sqrt(hbar/(m*omega_z)), energy in hbar*omega_z,
time in 1/omega_z. The trap is harmonic with a small quartic stiffening,
V(z) = (1/2)((z-c)^2 + K (z-c)^4)
and the perturbation is a sum of random-phase cosines with wavelengths
commensurate with the box, lambda_j = L/j.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar
from scipy.integrate import quad
from scipy.optimize import brentq

from .grids import PotentialField, require_same_grid


@dataclass(frozen=True)
class TrapSpec:
    """Anharmonic trap: quartic coefficient K and center (L_ho units)."""

    quartic_K: float = 0.05
    center: float = 0.0

    def __post_init__(self):
        if self.quartic_K < 0:
            raise ValueError(f"quartic_K must be >= 0, got {self.quartic_K}")

    def shifted(self, displacement):
        return TrapSpec(self.quartic_K, self.center + displacement)


@dataclass(frozen=True)
class SpeckleSpec:
    """Random cosine-sum perturbation: amplitude, mode band, RNG seed."""

    epsilon: float
    n_min: int = 1
    n_max: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if not (1 <= self.n_min <= self.n_max):
            raise ValueError(f"need 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")


@dataclass(frozen=True)
class PhysicalParams:
    """Lab-frame parameters; only used to derive the dimensionless coupling."""

    scattering_length: float  # m
    omega_z: float  # rad/s
    omega_perp: float  # rad/s
    atom_mass: float  # kg
    n_atoms: float

    def __post_init__(self):
        # a = 0 is allowed (ideal gas, zero coupling); the rest must be positive
        if self.scattering_length < 0:
            raise ValueError(f"scattering_length must be >= 0, got {self.scattering_length}")
        for name in ("omega_z", "omega_perp", "atom_mass", "n_atoms"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.omega_perp / self.omega_z <= 5:
            warnings.warn(
                "omega_perp/omega_z <= 5: the 1D reduction is questionable",
                stacklevel=2,
            )

    @property
    def oscillator_length(self):
        return float(np.sqrt(hbar / (self.atom_mass * self.omega_z)))


def dimensionless_coupling(p):
    """g_hat = g_1D/(L_ho hbar omega_z) with g_1D = 2 a hbar omega_perp."""
    return 2.0 * p.scattering_length * (p.omega_perp / p.omega_z) / p.oscillator_length


def trap_potential(grid, trap):
    """V_i = (1/2)((z_i - c)^2 + K (z_i - c)^4)."""
    u = grid.nodes - trap.center
    return PotentialField(grid, 0.5 * (u**2 + trap.quartic_K * u**4))


def speckle_potential(grid, spec):
    """delta-H_i = eps * sum_j cos(2 pi z_i j / L + alpha_j), j = n_min..n_max.

    The alpha_j are i.i.d. uniform on [0, 2pi) drawn from the seeded RNG in
    ascending j order, so the field is bit-for-bit reproducible from
    (grid, spec). Wavelengths lambda_j = L/j are commensurate with the box;
    the shortest must stay >= 2 L_ho.
    """
    if grid.length / spec.n_max < 2.0:
        raise ValueError(
            f"n_max={spec.n_max} gives lambda_min={grid.length / spec.n_max:g} < 2 L_ho"
        )
    rng = np.random.default_rng(spec.seed)
    n_waves = spec.n_max - spec.n_min + 1
    alphas = rng.uniform(0.0, 2 * np.pi, n_waves)
    js = np.arange(spec.n_min, spec.n_max + 1)
    # phases[i, m] = 2 pi z_i j_m / L + alpha_m
    phases = 2 * np.pi * np.outer(grid.nodes, js) / grid.length + alphas
    return PotentialField(grid, spec.epsilon * np.cos(phases).sum(axis=1))


def classical_period(trap, amplitude):
    """Oscillation period of a classical particle released at rest from
    `amplitude` away from the trap center.

    T = 4 * integral_0^{Dz} dz / sqrt(2 (V(Dz) - V(z))); substituting
    z = Dz sin(theta) removes the inverse-square-root endpoint singularity
    and leaves T = 4 * integral_0^{pi/2} dtheta / sqrt(1 + K Dz^2 (1 + sin^2 theta)).
    For K = 0 this is the isochronous 2 pi for every amplitude.
    """
    if not amplitude > 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    kd2 = trap.quartic_K * amplitude * amplitude

    def integrand(theta):
        s = np.sin(theta)
        return 1.0 / np.sqrt(1.0 + kd2 * (1.0 + s * s))

    val, _ = quad(integrand, 0.0, np.pi / 2, epsabs=0.0, epsrel=1e-10)
    return 4.0 * val


def gpe_energy(psi, potential, g_eff):
    """E = integral [ (1/2)|dpsi/dz|^2 + V|psi|^2 + (g_eff/2)|psi|^4 ] dz.

    The derivative is spectral; for a unit-norm state this is the conserved
    energy functional of the autonomous GPE.
    """
    require_same_grid(psi, potential)
    a = psi.amplitudes
    grad = np.fft.ifft(1j * psi.grid.wavenumbers * np.fft.fft(a))
    dens = a.real**2 + a.imag**2
    e = np.sum(
        0.5 * (grad.real**2 + grad.imag**2)
        + potential.values * dens
        + 0.5 * g_eff * dens * dens
    )
    return float(e * psi.grid.spacing)


def thomas_fermi_profile(grid, potential, g_eff):
    """Unit-norm Thomas-Fermi state sqrt(max(0, mu - V)/g_eff) with mu fixed
    by normalization (bracketed root solve). Requires g_eff > 0."""
    if not g_eff > 0:
        raise ValueError("Thomas-Fermi profile requires g_eff > 0")
    v = potential.values
    dz = grid.spacing

    def norm2(mu):
        return np.sum(np.maximum(0.0, mu - v)) * dz / g_eff - 1.0

    lo = float(v.min())
    hi = lo + 1.0
    while norm2(hi) < 0.0:
        hi = lo + 2 * (hi - lo)
    mu = brentq(norm2, lo, hi, xtol=1e-13, rtol=1e-15)
    from .grids import Wavefunction, normalize

    psi = Wavefunction(grid, np.sqrt(np.maximum(0.0, mu - v) / g_eff))
    return normalize(psi), float(mu)
