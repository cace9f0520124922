"""Benchmark the split-step kernels: numba JIT vs the pure-numpy fallback.

Two measurements per grid size:

  * kernel-only: the position-space phase/decay kicks, timed in-process
    against each other (both implementations are importable regardless of
    which one the package selected at import time);
  * full step: `step_realtime` throughput, timed in a subprocess per
    backend so the selection happens exactly the way users select it,
    via the GPE_ECHO_NO_NUMBA environment flag.

Run:  python3 benchmarks/bench_kernels.py [--sizes 1024,2048] [--steps 2000]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from gpe_echo import backend as bk


def _state(points, seed=7):
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(points) + 1j * rng.standard_normal(points)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2))
    v = 0.5 * np.linspace(-20, 20, points) ** 2
    return psi, v


def bench_kernels(points, repeat):
    """Per-call times (seconds) for each kick implementation."""
    psi, v = _state(points)
    out = {}
    impls = {"numpy": (bk._phase_kick_numpy, bk._decay_kick_numpy)}
    if bk.HAS_NUMBA:
        impls["numba"] = (bk._phase_kick_numba, bk._decay_kick_numba)
    for name, (phase, decay) in impls.items():
        phase(psi.copy(), v, 6300.0, 1e-4)  # trigger JIT before timing
        decay(psi.copy(), v, 6300.0, 1e-4)
        work = psi.copy()
        out[name] = {
            "phase_kick": min(
                timeit.repeat(lambda: phase(work, v, 6300.0, 1e-4), number=repeat, repeat=5)
            )
            / repeat,
            "decay_kick": min(
                timeit.repeat(lambda: decay(work, v, 6300.0, 1e-4), number=repeat, repeat=5)
            )
            / repeat,
        }
    return out


def bench_full_step(points, steps):
    """steps/second of `step_realtime` in the current process."""
    from gpe_echo import PotentialField, TrapSpec, Wavefunction, make_grid, trap_potential
    from gpe_echo.propagation import step_realtime

    grid = make_grid(40.0, points)
    v = trap_potential(grid, TrapSpec())
    psi = Wavefunction(grid, np.pi**-0.25 * np.exp(-grid.nodes**2 / 2) + 0j)
    psi = step_realtime(psi, v, 6300.0, 1.25e-4)  # warm up (JIT, FFT plan)
    t0 = timeit.default_timer()
    for _ in range(steps):
        psi = step_realtime(psi, v, 6300.0, 1.25e-4)
    return steps / (timeit.default_timer() - t0)


def _run_child(points, steps, no_numba):
    env = {**os.environ, "GPE_ECHO_NO_NUMBA": "1" if no_numba else "0"}
    out = subprocess.run(
        [sys.executable, __file__, "--child", str(points), "--steps", str(steps)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1024,2048", help="comma-separated grid sizes")
    ap.add_argument("--repeat", type=int, default=2000, help="kernel calls per timing sample")
    ap.add_argument("--steps", type=int, default=2000, help="full steps per backend run")
    ap.add_argument("--child", type=int, default=None, help=argparse.SUPPRESS)
    args = ap.parse_args(argv)

    if args.child is not None:
        print(json.dumps({"backend": bk.BACKEND, "steps_per_s": bench_full_step(args.child, args.steps)}))
        return 0

    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"selected backend at import: {bk.BACKEND} (numba available: {bk.HAS_NUMBA})\n")
    for points in sizes:
        print(f"grid {points}:")
        kern = bench_kernels(points, args.repeat)
        for name in ("numpy", "numba"):
            if name not in kern:
                print(f"  {name:>6}: not available")
                continue
            row = kern[name]
            print(
                f"  {name:>6}: phase_kick {row['phase_kick'] * 1e6:8.2f} us"
                f"   decay_kick {row['decay_kick'] * 1e6:8.2f} us"
            )
        if "numba" in kern:
            speedup = kern["numpy"]["phase_kick"] / kern["numba"]["phase_kick"]
            print(f"  kernel speedup (phase_kick): {speedup:.2f}x")
        full = {}
        for no_numba in (False, True):
            child = _run_child(points, args.steps, no_numba)
            full[child["backend"]] = child["steps_per_s"]
            print(f"  full step [{child['backend']:>5}]: {child['steps_per_s']:9.0f} steps/s")
        if "numba" in full and "numpy" in full:
            print(f"  full-step speedup: {full['numba'] / full['numpy']:.2f}x")
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
