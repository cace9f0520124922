"""Campaign execution: single runs and sweeps, persistence, manifests.

A campaign executes one echo experiment per sweep value (or a single one),
fits each curve, runs the scaling regression for sweeps, and writes:

  curve_<label>.csv   one per echo: header t,F,F_a,F_std, >= 12 significant
                      digits, newline-terminated
  summary.json        resolved config, per-run fit records, scaling fits,
                      seeds; deterministic byte-for-byte for a given config
  run_manifest.json   summary.json's sibling carrying the non-deterministic
                      provenance (wall clock, host, timing) plus the resolved
                      config and output index; `gpe-echo run run_manifest.json`
                      replays the campaign bit-identically
  ground_state_<label>.npz   optional checkpoints (emit: [checkpoints])

Sweeps reuse the same master seed for every value, so curves differ only
through the swept parameter.
"""

import dataclasses
import json
import os
import platform
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .analysis import critical_time, fermi_fit, scaling_fit_epsilon, scaling_fit_natoms
from .echo import run_echo, run_echo_pairwise_stats
from .errors import FitError
from .physics import classical_period, trap_potential
from .propagation import ground_state, save_ground_state


def _fmt(x):
    """Decimal text with 14 significant digits (contract asks >= 12)."""
    return f"{x:.13e}"


def emit_curve_csv(curve, path):
    """Write t,F,F_a,F_std rows; F_std is the across-pair standard deviation."""
    if len(curve.times) == 0:
        raise ValueError("refusing to write an empty curve")
    std = (
        run_echo_pairwise_stats(curve).std
        if curve.per_pair is not None
        else np.zeros_like(curve.times)
    )
    with open(path, "w", newline="\n") as fh:
        fh.write("t,F,F_a,F_std\n")
        for t, f, fa, fs in zip(curve.times, curve.fidelity, curve.amplitude_fidelity, std):
            fh.write(f"{_fmt(t)},{_fmt(f)},{_fmt(fa)},{_fmt(fs)}\n")


def emit_summary_json(summary, path):
    """Single JSON document; unreached tau_c serializes as null."""
    with open(path, "w", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _fit_record(curve, label, fix_T):
    """Fit one curve; tau_c 'not reached' and fit failures are recorded, not fatal."""
    record = {
        "label": label,
        "tau_c_crossing": critical_time(curve),
        "tau_c_fit": None,
        "T": None,
        "f_inf": None,
        "residual_rms": None,
        "T_was_fixed": fix_T is not None,
        "n_pairs": curve.n_pairs,
    }
    try:
        fit = fermi_fit(curve, T_fixed=fix_T)
    except FitError as exc:
        record["fit_error"] = str(exc)
        return record
    record.update(
        tau_c_fit=fit.tau_c, T=fit.T, f_inf=fit.f_inf, residual_rms=fit.residual_rms
    )
    return record


def _sweep_label(mode, value):
    key = {"sweep-epsilon": "eps", "sweep-natoms": "natoms", "sweep-displacement": "dz"}[mode]
    return f"{key}_{value:g}"


def _echo_variant(base, mode, value):
    """The base EchoConfig with one swept field replaced (natoms is handled
    by the caller because it enters through evolve.g_eff)."""
    if mode == "sweep-epsilon":
        speckle = dataclasses.replace(base.speckle_template, epsilon=float(value))
        return dataclasses.replace(base, speckle_template=speckle)
    if mode == "sweep-displacement":
        return dataclasses.replace(base, displacement=float(value))
    raise ValueError(f"not a sweep mode: {mode}")


def run_campaign(config, workers=None, out_dir=None):
    """Execute a CampaignConfig; returns the summary dict.

    `workers`/`out_dir` override the config (CLI flags); default worker
    count comes from the config, else GPE_ECHO_WORKERS, else 1.
    """
    if workers is None:
        workers = config.workers
    if workers is None:
        env = os.environ.get("GPE_ECHO_WORKERS", "").strip()
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    out = out_dir if out_dir is not None else config.output_dir
    os.makedirs(out, exist_ok=True)

    t_start = time.perf_counter()
    base = config.echo
    g_hat = config.resolved["g_hat"]

    def fixed_T_for(echo_cfg):
        # fit_fix_t pins the decay width to the classical oscillation period
        if config.fit_fix_t and echo_cfg.displacement > 0:
            return classical_period(echo_cfg.trap, echo_cfg.displacement)
        return None

    fix_T = fixed_T_for(base)

    outputs = []
    fits = []
    scalings = {}
    runs = []

    if config.mode == "ground-state-only":
        grid = base.grid
        clean = trap_potential(grid, base.trap)
        psi, energy = ground_state(grid, clean, base.evolve.g_eff, base.ground_state_params)
        dens = np.abs(psi.amplitudes) ** 2
        above = np.nonzero(dens >= 1e-4 * dens.max())[0]
        half_length = float(
            (grid.nodes[above[-1]] - grid.nodes[above[0]]) / 2 if len(above) else 0.0
        )
        ckpt = os.path.join(out, "ground_state.npz")
        save_ground_state(ckpt, psi, base.evolve.g_eff, base.trap.quartic_K, energy)
        outputs.append(os.path.basename(ckpt))
        runs.append(
            {
                "label": "ground-state",
                "energy": energy,
                "half_length": half_length,
                "g_eff": base.evolve.g_eff,
            }
        )
    else:
        if config.mode == "single-echo":
            jobs = [("single", None, base)]
        elif config.mode == "sweep-natoms":
            jobs = []
            for value in config.sweep_values:
                evolve = dataclasses.replace(base.evolve, g_eff=g_hat * float(value))
                jobs.append(
                    (
                        _sweep_label(config.mode, value),
                        float(value),
                        dataclasses.replace(base, evolve=evolve),
                    )
                )
        else:
            jobs = [
                (_sweep_label(config.mode, value), float(value), _echo_variant(base, config.mode, value))
                for value in config.sweep_values
            ]

        records = []
        for label, value, echo_cfg in jobs:
            run_info = {"label": label}
            try:
                curve = run_echo(echo_cfg, workers=workers)
            except Exception as exc:  # a failed run is recorded, the sweep continues
                run_info["error"] = f"{type(exc).__name__}: {exc}"
                runs.append(run_info)
                continue
            if "curves-csv" in config.emit:
                csv_path = os.path.join(out, f"curve_{label}.csv")
                emit_curve_csv(curve, csv_path)
                outputs.append(os.path.basename(csv_path))
            if "checkpoints" in config.emit:
                grid = echo_cfg.grid
                clean = trap_potential(grid, echo_cfg.trap)
                psi, energy = ground_state(
                    grid, clean, echo_cfg.evolve.g_eff, echo_cfg.ground_state_params
                )
                ckpt = os.path.join(out, f"ground_state_{label}.npz")
                save_ground_state(ckpt, psi, echo_cfg.evolve.g_eff, echo_cfg.trap.quartic_K, energy)
                outputs.append(os.path.basename(ckpt))
            fit = _fit_record(curve, label, fixed_T_for(echo_cfg))
            fits.append(fit)
            run_info["seeds"] = [
                echo_cfg.speckle_for(j).seed for j in range(echo_cfg.n_realizations)
            ]
            runs.append(run_info)
            records.append((value, fit["tau_c_crossing"]))

        if config.mode in ("sweep-epsilon", "sweep-natoms"):
            pairs = [(value, tau) for value, tau in records if tau is not None]
            try:
                if config.mode == "sweep-epsilon":
                    fit = scaling_fit_epsilon(pairs)
                    scalings["epsilon"] = {
                        "slope_t0": fit.slope,
                        "intercept": fit.intercept,
                        "r_squared": fit.r_squared,
                        "abscissa": "-ln(epsilon)",
                        "points": [list(p) for p in fit.points],
                    }
                else:
                    fit = scaling_fit_natoms(pairs)
                    scalings["natoms"] = {
                        "slope": fit.slope,
                        "intercept": fit.intercept,
                        "r_squared": fit.r_squared,
                        "abscissa": "ln(n_atoms)",
                        "points": [list(p) for p in fit.points],
                    }
            except ValueError as exc:
                scalings["error"] = str(exc)

    summary = {
        "config": config.resolved,
        "mode": config.mode,
        "master_seed": base.master_seed,
        "fit_T_fixed_to": fix_T,
        "runs": runs,
        "fits": fits,
        "scalings": scalings,
    }
    if "summary-json" in config.emit:
        path = os.path.join(out, "summary.json")
        emit_summary_json(summary, path)
        outputs.append(os.path.basename(path))

    manifest = {
        "format_version": 1,
        "tool": "gpe-echo",
        "code_version": __version__,
        "config": config.resolved,
        "master_seed": base.master_seed,
        "outputs": sorted(outputs),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "host": platform.node(),
        "elapsed_s": round(time.perf_counter() - t_start, 3),
        "workers": workers,
    }
    with open(os.path.join(out, "run_manifest.json"), "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return summary
