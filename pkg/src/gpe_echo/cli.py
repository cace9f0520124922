"""Command-line interface.

    gpe-echo run <config.yaml> [--workers N] [--seed S] [--out DIR]
    gpe-echo ground-state <config.yaml> [--out DIR]
    gpe-echo fit <curve.csv> [--fix-T <value>]

`run` executes the campaign described by the config (a run_manifest.json
from a previous campaign is also accepted and replays it). `ground-state`
only relaxes and checkpoints the initial state. `fit` fits the Fermi decay
model to an emitted curve CSV. The default worker count comes from
GPE_ECHO_WORKERS when --workers is absent and the config says nothing.
"""

import argparse
import json
import sys

import numpy as np

from .analysis import critical_time, fermi_fit
from .campaign import run_campaign
from .config import load_config, resolve_config
from .echo import EchoCurve
from .errors import ConfigError, FitError


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gpe-echo",
        description="Fidelity-echo simulations of a trapped 1D condensate "
        "under weak random potentials",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the campaign described by a config file")
    p_run.add_argument("config", help="YAML config (or a run_manifest.json to replay)")
    p_run.add_argument("--workers", type=int, default=None, help="max concurrent realizations")
    p_run.add_argument("--seed", type=int, default=None, help="override master_seed")
    p_run.add_argument("--out", default=None, help="override output directory")

    p_gs = sub.add_parser("ground-state", help="relax and checkpoint the ground state only")
    p_gs.add_argument("config", help="YAML config")
    p_gs.add_argument("--seed", type=int, default=None, help="override master_seed")
    p_gs.add_argument("--out", default=None, help="override output directory")

    p_fit = sub.add_parser("fit", help="fit the Fermi decay model to a curve CSV")
    p_fit.add_argument("curve", help="CSV with header t,F,F_a,F_std")
    p_fit.add_argument(
        "--fix-T", type=float, default=None, dest="fix_t",
        help="pin the decay width T instead of fitting it",
    )
    return parser


def _load_with_overrides(path, seed=None, mode=None):
    cfg = load_config(path)
    if seed is None and mode is None:
        return cfg
    raw = dict(cfg.resolved)
    if seed is not None:
        raw["master_seed"] = seed
    if mode is not None:
        raw["mode"] = mode
    return resolve_config(raw, source=f"{path} (with CLI overrides)")


def read_curve_csv(path):
    """Parse a t,F,F_a,F_std CSV back into an EchoCurve (per_pair not stored)."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    expected = ("t", "F", "F_a", "F_std")
    if data.dtype.names != expected:
        raise ValueError(f"{path}: expected header {','.join(expected)}, got {data.dtype.names}")
    data = np.atleast_1d(data)
    return EchoCurve(
        times=data["t"],
        fidelity=data["F"],
        amplitude_fidelity=data["F_a"],
        n_pairs=0,
        per_pair=None,
    )


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = _load_with_overrides(args.config, seed=args.seed)
            summary = run_campaign(cfg, workers=args.workers, out_dir=args.out)
            out = args.out if args.out is not None else cfg.output_dir
            for fit in summary["fits"]:
                tau = fit["tau_c_crossing"]
                tau_txt = "not reached" if tau is None else f"{tau:.3f}"
                print(f"{fit['label']}: tau_c(0.6 crossing) = {tau_txt}")
            for name, rec in summary["scalings"].items():
                if isinstance(rec, dict):
                    slope_key = "slope_t0" if "slope_t0" in rec else "slope"
                    print(
                        f"scaling[{name}]: slope = {rec[slope_key]:.4f}, "
                        f"r^2 = {rec['r_squared']:.4f}"
                    )
            print(f"artifacts written to {out}")
        elif args.command == "ground-state":
            cfg = _load_with_overrides(args.config, seed=args.seed, mode="ground-state-only")
            summary = run_campaign(cfg, out_dir=args.out)
            rec = summary["runs"][0]
            print(
                f"ground state: energy = {rec['energy']:.9f} hbar*omega_z, "
                f"half-length = {rec['half_length']:.3f} L_ho (g_eff = {rec['g_eff']:g})"
            )
            out = args.out if args.out is not None else cfg.output_dir
            print(f"checkpoint written to {out}")
        elif args.command == "fit":
            curve = read_curve_csv(args.curve)
            tau = critical_time(curve)
            result = fermi_fit(curve, T_fixed=args.fix_t)
            print(
                json.dumps(
                    {
                        "tau_c_crossing": tau,
                        "tau_c_fit": result.tau_c,
                        "T": result.T,
                        "f_inf": result.f_inf,
                        "residual_rms": result.residual_rms,
                        "T_was_fixed": result.T_was_fixed,
                    },
                    indent=2,
                    sort_keys=True,
                )
            )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (FitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
