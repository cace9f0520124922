"""The fidelity-echo experiment.

Protocol: (i) relax to the ground state of the clean, centered trap;
(ii) displace the trap center suddenly by Dz (the speckle stays in the lab
frame and the state does not move); (iii) evolve N copies of the state,
each under the displaced trap plus its own random speckle realization, and
average the M = N(N-1)/2 pairwise fidelities
    F_ij(t)   = |<psi_i(t)|psi_j(t)>|^2
    F_a,ij(t) = (integral |psi_i||psi_j| dz)^2
over all unordered pairs. All realizations share epsilon and the wavelength
ladder; only the random phases differ.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grids import Grid, Wavefunction, inner_product, require_same_grid
from .physics import SpeckleSpec, TrapSpec, speckle_potential, trap_potential
from .propagation import EvolveParams, GroundStateParams, evolve, ground_state


def fidelity(a, b):
    """F = |<a|b>|^2."""
    return abs(inner_product(a, b)) ** 2


def amplitude_fidelity(a, b):
    """F_a = (sum |a_i||b_i| spacing)^2; blind to all phase information."""
    require_same_grid(a, b)
    s = np.sum(np.abs(a.amplitudes) * np.abs(b.amplitudes)) * a.grid.spacing
    return float(s) ** 2


def realization_seed(master_seed, j):
    """Seed for realization j: first 64-bit word of SeedSequence((master_seed, j)).

    A stated, splittable rule so any single realization can be regenerated
    in isolation (e.g. on another worker) without drawing the others.
    """
    return int(np.random.SeedSequence((master_seed, j)).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class EchoConfig:
    """Full parameter set for one echo experiment."""

    grid: Grid
    trap: TrapSpec
    displacement: float
    speckle_template: SpeckleSpec  # seed field ignored; per-realization seeds derived
    n_realizations: int
    master_seed: int
    evolve: EvolveParams
    ground_state_params: GroundStateParams = GroundStateParams()

    def __post_init__(self):
        if self.n_realizations < 2:
            raise ValueError(f"need at least 2 realizations, got {self.n_realizations}")
        if self.displacement < 0:
            raise ValueError(f"displacement must be >= 0, got {self.displacement}")

    def speckle_for(self, j):
        t = self.speckle_template
        return SpeckleSpec(t.epsilon, t.n_min, t.n_max, realization_seed(self.master_seed, j))


@dataclass
class EchoCurve:
    """Pair-averaged fidelity curve; times include t=0 (F(0) = 1 exactly)."""

    times: np.ndarray
    fidelity: np.ndarray
    amplitude_fidelity: np.ndarray
    n_pairs: int
    per_pair: Optional[np.ndarray] = None  # shape (n_pairs, len(times))


@dataclass(frozen=True)
class PairStats:
    """Across-pair spread of the partial fidelities, for error bars."""

    std: np.ndarray
    min: np.ndarray
    max: np.ndarray


def _evolve_realization(psi0, potential, params):
    traj = evolve(psi0, potential, params, {"state": lambda w: w.amplitudes.copy()})
    return traj.times, np.array(traj.records["state"])


def run_echo(config, workers=1):
    """Run the echo experiment; returns the pair-averaged EchoCurve.

    Realizations are independent and run on a thread pool of `workers`
    (the split-step kernels release the GIL); outputs are bit-identical
    for any worker count because the reduction order is fixed.
    """
    grid = config.grid
    g_eff = config.evolve.g_eff
    clean = trap_potential(grid, config.trap)
    psi0, _ = ground_state(grid, clean, g_eff, config.ground_state_params)
    shifted = trap_potential(grid, config.trap.shifted(config.displacement))

    potentials = [
        shifted + speckle_potential(grid, config.speckle_for(j))
        for j in range(config.n_realizations)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda v: _evolve_realization(psi0, v, config.evolve), potentials)
            )
    else:
        results = [_evolve_realization(psi0, v, config.evolve) for v in potentials]

    times = np.concatenate(([0.0], results[0][0]))
    # snapshots[j]: (n_samples, points) complex
    snapshots = [r[1] for r in results]
    n = config.n_realizations
    ii, jj = np.triu_indices(n, k=1)
    n_pairs = len(ii)
    n_samples = snapshots[0].shape[0]
    dz = grid.spacing

    per_pair = np.empty((n_pairs, n_samples + 1))
    per_pair[:, 0] = 1.0  # all realizations share the initial state
    f_a = np.empty(n_samples + 1)
    f_a[0] = 1.0
    for s in range(n_samples):
        a = np.array([snap[s] for snap in snapshots])
        gram = (np.conj(a) @ a.T) * dz
        mod = np.abs(a)
        gram_a = (mod @ mod.T) * dz
        per_pair[:, s + 1] = np.abs(gram[ii, jj]) ** 2
        f_a[s + 1] = np.mean(gram_a[ii, jj] ** 2)

    return EchoCurve(
        times=times,
        fidelity=per_pair.mean(axis=0),
        amplitude_fidelity=f_a,
        n_pairs=n_pairs,
        per_pair=per_pair,
    )


def run_echo_pairwise_stats(curve):
    """Per-time std/min/max of F across the M pairs (needs per_pair)."""
    if curve.per_pair is None:
        raise ValueError("curve was built without per-pair fidelities")
    return PairStats(
        std=curve.per_pair.std(axis=0),
        min=curve.per_pair.min(axis=0),
        max=curve.per_pair.max(axis=0),
    )
