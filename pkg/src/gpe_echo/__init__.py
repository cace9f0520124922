"""Fidelity-echo simulations of a trapped 1D Bose-Einstein condensate.

Split-step Fourier GPE propagation, imaginary-time ground states, ensemble
fidelity echoes under weak random potentials, Fermi-curve decay fits, and
the logarithmic scaling of the collapse time with perturbation amplitude
and atom number.
"""

__version__ = "0.1.0"

from .backend import BACKEND, HAS_NUMBA
from .grids import (
    Grid,
    PotentialField,
    Wavefunction,
    expectation_position,
    inner_product,
    make_grid,
    normalize,
    quadrature_norm,
)
from .physics import (
    PhysicalParams,
    SpeckleSpec,
    TrapSpec,
    classical_period,
    dimensionless_coupling,
    gpe_energy,
    speckle_potential,
    thomas_fermi_profile,
    trap_potential,
)
from .propagation import (
    STABLE_NYQUIST_PHASE,
    EvolveParams,
    GroundStateCheckpoint,
    GroundStateParams,
    SampledTrajectory,
    evolve,
    ground_state,
    load_ground_state,
    nyquist_phase,
    save_ground_state,
    step_realtime,
)
from .echo import (
    EchoConfig,
    EchoCurve,
    amplitude_fidelity,
    fidelity,
    realization_seed,
    run_echo,
    run_echo_pairwise_stats,
)
from .analysis import (
    FermiFitResult,
    ScalingFit,
    critical_time,
    fermi_curve,
    fermi_fit,
    scaling_fit_epsilon,
    scaling_fit_natoms,
)
from .config import CampaignConfig, load_config, resolve_config
from .campaign import emit_curve_csv, emit_summary_json, run_campaign
from .errors import (
    BlowUpError,
    ConfigError,
    ConvergenceError,
    FitError,
    GridMismatchError,
)
