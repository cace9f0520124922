"""Campaign configuration: structured-text parsing, defaults, validation.

Configs are YAML mappings with flat, documented keys (JSON works too, being
a YAML subset — which is how a run manifest can be replayed directly). A
minimal config is just `{mode: single-echo}`; every omitted key takes the
documented default below, frozen to the benchmark parameter set so a bare
config reproduces the reference collapse curve. Unknown keys are rejected.
"""

import json
import math
from dataclasses import dataclass
from typing import Optional

import yaml

from .errors import ConfigError
from .grids import make_grid
from .physics import PhysicalParams, SpeckleSpec, TrapSpec, dimensionless_coupling
from .propagation import EvolveParams, GroundStateParams
from .echo import EchoConfig

MODES = (
    "single-echo",
    "sweep-epsilon",
    "sweep-natoms",
    "sweep-displacement",
    "ground-state-only",
)
EMIT_KINDS = ("curves-csv", "summary-json", "checkpoints")

DEFAULTS = {
    "mode": "single-echo",
    "epsilon": 1e-5,
    "displacement": 3.0,
    "quartic_k": 0.05,
    "trap_center": 0.0,
    "n_atoms": 1e5,
    "g_hat": 0.063,
    "n_realizations": 11,
    "master_seed": 1234,
    "grid_length": 40.0,
    "grid_points": 2048,
    "speckle_n_min": 1,
    "speckle_n_max": 20,
    "dt": 1.25e-4,
    "t_max": 60.0,
    "sample_interval": 0.1,
    "dt_imag": 1e-4,
    "energy_tol": 1e-12,
    "max_steps": 10**6,
    "workers": None,
    "output_dir": "gpe-echo-out",
    "emit": ["curves-csv", "summary-json"],
    "sweep_values": None,
    "fit_fix_t": True,
    "physical": None,
}

PHYSICAL_KEYS = ("scattering_length_m", "omega_z_hz", "omega_perp_hz", "atom_mass_kg")

_FLOAT_KEYS = (
    "epsilon", "displacement", "quartic_k", "trap_center", "n_atoms", "g_hat",
    "grid_length", "dt", "t_max", "sample_interval", "dt_imag", "energy_tol",
)
_INT_KEYS = (
    "n_realizations", "master_seed", "grid_points", "speckle_n_min",
    "speckle_n_max", "max_steps",
)


@dataclass(frozen=True)
class CampaignConfig:
    """A fully resolved campaign: mode, base echo experiment, sweep, I/O."""

    mode: str
    echo: EchoConfig
    sweep_values: Optional[tuple]
    workers: Optional[int]
    output_dir: str
    emit: frozenset
    fit_fix_t: bool
    resolved: dict  # the defaults-expanded primitive mapping (for the manifest)


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def load_config(path):
    """Parse and validate a config file; returns a CampaignConfig."""
    try:
        with open(path) as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    try:
        # JSON first: YAML 1.1 reads bare exponents like 1e-12 as strings
        raw = json.loads(text)
    except json.JSONDecodeError:
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config parse error in {path}: {exc}")
    if raw is None:
        raise ConfigError(f"empty config file: {path}")
    if isinstance(raw, dict) and "config" in raw and "format_version" in raw:
        raw = raw["config"]  # a run manifest: replay its resolved config
    return resolve_config(raw, source=str(path))


def resolve_config(raw, source="<dict>"):
    """Validate a raw mapping and materialize all defaults."""
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"{source}: unknown key(s) {unknown}; allowed: {sorted(DEFAULTS)}")
    cfg = {**DEFAULTS, **raw}

    # numeric keys may arrive as YAML strings (bare exponents like 1e-5 are
    # not YAML 1.1 floats); coerce before any comparison
    for key in _FLOAT_KEYS:
        try:
            cfg[key] = float(cfg[key])
        except (TypeError, ValueError):
            raise ConfigError(f"{source}: {key} must be a number, got {cfg[key]!r}")
    for key in _INT_KEYS:
        try:
            cfg[key] = int(cfg[key])
        except (TypeError, ValueError):
            raise ConfigError(f"{source}: {key} must be an integer, got {cfg[key]!r}")

    mode = cfg["mode"]
    _require(mode in MODES, f"mode must be one of {MODES}, got {mode!r}")

    phys = cfg["physical"]
    physical = None
    if phys is not None:
        _require(isinstance(phys, dict), "physical must be a mapping")
        bad = sorted(set(phys) - set(PHYSICAL_KEYS))
        _require(not bad, f"physical: unknown key(s) {bad}; allowed: {list(PHYSICAL_KEYS)}")
        missing = sorted(set(PHYSICAL_KEYS) - set(phys))
        _require(not missing, f"physical: missing key(s) {missing}")
        _require(cfg["n_atoms"] > 0, "physical block requires n_atoms > 0")
        try:
            physical = PhysicalParams(
                scattering_length=float(phys["scattering_length_m"]),
                omega_z=2 * math.pi * float(phys["omega_z_hz"]),
                omega_perp=2 * math.pi * float(phys["omega_perp_hz"]),
                atom_mass=float(phys["atom_mass_kg"]),
                n_atoms=float(cfg["n_atoms"]),
            )
        except ValueError as exc:
            raise ConfigError(f"physical: {exc}")
        cfg["g_hat"] = dimensionless_coupling(physical)

    _require(cfg["n_atoms"] >= 0, "n_atoms must be >= 0 (0 selects the linear equation)")
    _require(cfg["g_hat"] >= 0, "g_hat must be >= 0")
    g_eff = float(cfg["g_hat"]) * float(cfg["n_atoms"])

    emit = cfg["emit"]
    _require(isinstance(emit, (list, tuple)), "emit must be a list")
    bad = sorted(set(emit) - set(EMIT_KINDS))
    _require(not bad, f"emit: unknown kind(s) {bad}; allowed: {list(EMIT_KINDS)}")

    sweep_values = cfg["sweep_values"]
    if mode.startswith("sweep-"):
        _require(
            isinstance(sweep_values, (list, tuple)) and len(sweep_values) > 0,
            f"{mode} requires a non-empty sweep_values list",
        )
        sweep_values = tuple(float(v) for v in sweep_values)
        if mode == "sweep-epsilon":
            _require(all(v >= 0 for v in sweep_values), "epsilon sweep values must be >= 0")
        elif mode == "sweep-natoms":
            _require(all(v >= 0 for v in sweep_values), "n_atoms sweep values must be >= 0")
        elif mode == "sweep-displacement":
            _require(all(v >= 0 for v in sweep_values), "displacement sweep values must be >= 0")
    else:
        sweep_values = None

    workers = cfg["workers"]
    if workers is not None:
        _require(isinstance(workers, int) and workers >= 1, "workers must be an integer >= 1")

    try:
        grid = make_grid(float(cfg["grid_length"]), int(cfg["grid_points"]))
        trap = TrapSpec(float(cfg["quartic_k"]), float(cfg["trap_center"]))
        speckle = SpeckleSpec(
            epsilon=float(cfg["epsilon"]),
            n_min=int(cfg["speckle_n_min"]),
            n_max=int(cfg["speckle_n_max"]),
            seed=0,
        )
        _require(
            grid.length / speckle.n_max >= 2.0,
            f"speckle_n_max={speckle.n_max} violates the minimum wavelength "
            f"2 L_ho on a {grid.length} L_ho box",
        )
        evolve = EvolveParams(
            dt=float(cfg["dt"]),
            t_max=float(cfg["t_max"]),
            sample_interval=float(cfg["sample_interval"]),
            g_eff=g_eff,
        )
        gs = GroundStateParams(
            dt_imag=float(cfg["dt_imag"]),
            energy_tol=float(cfg["energy_tol"]),
            max_steps=int(cfg["max_steps"]),
        )
        echo = EchoConfig(
            grid=grid,
            trap=trap,
            displacement=float(cfg["displacement"]),
            speckle_template=speckle,
            n_realizations=int(cfg["n_realizations"]),
            master_seed=int(cfg["master_seed"]),
            evolve=evolve,
            ground_state_params=gs,
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}")

    # cfg scalars are coerced above, so re-resolving this mapping (manifest
    # replay) is idempotent and emitted bytes do not depend on how the input
    # file spelled its numbers
    resolved = {k: cfg[k] for k in DEFAULTS}
    resolved.update(
        mode=mode,
        workers=workers,
        output_dir=str(cfg["output_dir"]),
        emit=sorted(set(emit)),
        sweep_values=list(sweep_values) if sweep_values is not None else None,
        fit_fix_t=bool(cfg["fit_fix_t"]),
        physical={k: float(phys[k]) for k in PHYSICAL_KEYS} if phys is not None else None,
    )

    return CampaignConfig(
        mode=mode,
        echo=echo,
        sweep_values=sweep_values,
        workers=workers,
        output_dir=str(cfg["output_dir"]),
        emit=frozenset(emit),
        fit_fix_t=bool(cfg["fit_fix_t"]),
        resolved=resolved,
    )
