"""End-to-end acceptance suite for the fidelity-collapse package.

Nine numbered criteria; each test prints exactly one scoreboard line
`criterion N: PASS|FAIL [measured details]` so a log scrape shows the
whole picture at once. Criteria 4-7 share module-scoped N=11 echo
ensembles at the benchmark resolution (box 40 x 2048 points,
dt = 1.25e-4, which keeps the kinetic Nyquist phase at 1.62 rad); the
full module is CPU-bound, roughly an hour single-core, dominated by
those six ensembles.
"""

import numpy as np
import pytest

from gpe_echo import (
    EchoConfig,
    EchoCurve,
    EvolveParams,
    PotentialField,
    SpeckleSpec,
    TrapSpec,
    Wavefunction,
    classical_period,
    critical_time,
    evolve,
    fermi_curve,
    fermi_fit,
    fidelity,
    gpe_energy,
    ground_state,
    make_grid,
    quadrature_norm,
    run_echo,
    scaling_fit_epsilon,
    scaling_fit_natoms,
    trap_potential,
)
from gpe_echo.campaign import run_campaign
from gpe_echo.config import resolve_config
from gpe_echo.physics import thomas_fermi_profile

G_HAT = 0.063  # dimensionless 1D coupling for the benchmark species/trap
BENCH_ATOMS = 1e5
BENCH_G = G_HAT * BENCH_ATOMS  # 6300


def _criterion(num, checks):
    """checks: [(ok, detail), ...]; print one scoreboard line, then assert."""
    ok = all(c[0] for c in checks)
    detail = "; ".join(d for _, d in checks)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} [{detail}]")
    assert ok, f"criterion {num}: {detail}"


def _ensemble(epsilon, g_eff, t_max, n_realizations=11):
    """One N-realization echo ensemble at benchmark resolution."""
    cfg = EchoConfig(
        grid=make_grid(40.0, 2048),
        trap=TrapSpec(quartic_K=0.05, center=0.0),
        displacement=3.0,
        speckle_template=SpeckleSpec(epsilon=epsilon, n_min=1, n_max=20, seed=0),
        n_realizations=n_realizations,
        master_seed=1234,
        evolve=EvolveParams(dt=1.25e-4, t_max=t_max, sample_interval=0.1, g_eff=g_eff),
    )
    return run_echo(cfg)


# ---------------------------------------------------------------- ensembles
# All sweeps reuse the same master seed so the swept parameter is the only
# thing that varies. t_max per run = expected crossing + >10 units of margin.


@pytest.fixture(scope="module")
def collapse_curve():
    """The reference collapse: eps=1e-5 at the benchmark coupling."""
    return _ensemble(1e-5, BENCH_G, t_max=60.0)


@pytest.fixture(scope="module")
def curve_eps_large():
    return _ensemble(1e-3, BENCH_G, t_max=44.0)


@pytest.fixture(scope="module")
def curve_eps_small():
    return _ensemble(1e-7, BENCH_G, t_max=80.0)


@pytest.fixture(scope="module")
def curve_na_small():
    return _ensemble(1e-5, G_HAT * 2e4, t_max=90.0)


@pytest.fixture(scope="module")
def curve_na_mid():
    return _ensemble(1e-5, G_HAT * 5e4, t_max=68.0)


@pytest.fixture(scope="module")
def curve_linear():
    return _ensemble(1e-5, 0.0, t_max=60.0)


# ---------------------------------------------------------------- criteria


def test_criterion_1_classical_period_oracle():
    checks = []
    trap = TrapSpec(quartic_K=0.05)
    for dz, ref in ((3.0, 4.86), (2.0, 5.56), (4.0, 4.27)):
        period = classical_period(trap, dz)
        checks.append(
            (abs(period - ref) <= 0.03 * ref, f"T(dz={dz:g})={period:.4f} vs {ref}+-3%")
        )
    harmonic = TrapSpec(quartic_K=0.0)
    devs = [abs(classical_period(harmonic, a) - 2 * np.pi) for a in (0.5, 1.0, 3.0, 5.0)]
    checks.append((max(devs) < 1e-6, f"max |T_harmonic - 2pi| = {max(devs):.1e} < 1e-6"))
    _criterion(1, checks)


def test_criterion_2_ground_state_suite():
    checks = []
    g512 = make_grid(40.0, 512)
    v_h = trap_potential(g512, TrapSpec(quartic_K=0.0))
    psi_h, e_h = ground_state(g512, v_h, 0.0)
    gauss = Wavefunction(g512, np.pi**-0.25 * np.exp(-g512.nodes**2 / 2) + 0j)
    overlap = np.sqrt(fidelity(psi_h, gauss))
    checks.append((abs(e_h - 0.5) <= 1e-6, f"E_harmonic={e_h:.8f} vs 0.5+-1e-6"))
    checks.append((overlap > 1 - 1e-8, f"Gaussian overlap deficit={1 - overlap:.1e} < 1e-8"))

    grid = make_grid(40.0, 2048)
    v = trap_potential(grid, TrapSpec())
    psi, _ = ground_state(grid, v, BENCH_G)
    dens = np.abs(psi.amplitudes) ** 2
    occupied = grid.nodes[dens >= 1e-4 * dens.max()]
    half_len = 0.5 * (occupied.max() - occupied.min())
    checks.append(
        (abs(half_len - 11.1) <= 0.1 * 11.1, f"half-length={half_len:.2f} vs 11.1+-10%")
    )

    tf, _ = thomas_fermi_profile(grid, v, BENCH_G)
    # Full-domain L2 distance; it upper-bounds any boundary-layer-excluded
    # version, so passing here is the stronger statement.
    dist = np.sqrt(
        np.sum((np.abs(psi.amplitudes) - np.abs(tf.amplitudes)) ** 2) * grid.spacing
    )
    checks.append((dist < 0.05, f"L2-to-TF={dist:.4f} < 0.05"))
    _criterion(2, checks)


def test_criterion_3_propagator_suite():
    checks = []
    grid = make_grid(40.0, 2048)
    v = trap_potential(grid, TrapSpec())
    psi, _ = ground_state(grid, v, BENCH_G)

    # Norm and energy conservation on a stationary state, t=50 at the
    # production step (4e5 steps, which covers the 1e5-step norm budget).
    e0 = gpe_energy(psi, v, BENCH_G)
    params = EvolveParams(dt=1.25e-4, t_max=50.0, sample_interval=0.5, g_eff=BENCH_G)
    traj = evolve(
        psi,
        v,
        params,
        {"norm": quadrature_norm, "energy": lambda w: gpe_energy(w, v, BENCH_G)},
    )
    norm_dev = float(np.max(np.abs(np.asarray(traj.records["norm"]) - 1.0)))
    e_dev = float(np.max(np.abs(np.asarray(traj.records["energy"]) - e0)) / abs(e0))
    n_steps = round(params.t_max / params.dt)
    checks.append((norm_dev < 1e-9, f"norm drift={norm_dev:.1e} over {n_steps} steps < 1e-9"))
    checks.append((e_dev < 1e-6, f"energy drift={e_dev:.1e} rel over t=50 < 1e-6"))

    # Second-order convergence on the displaced-trap benchmark: L2 error at
    # t=5 against a dt/8 reference must shrink 4x when dt halves.
    shifted = trap_potential(grid, TrapSpec(quartic_K=0.05, center=3.0))
    finals = {}
    for dt in (1.25e-4, 6.25e-5, 1.5625e-5):
        p = EvolveParams(dt=dt, t_max=5.0, sample_interval=5.0, g_eff=BENCH_G)
        finals[dt] = evolve(psi, shifted, p, {"a": lambda w: w.amplitudes.copy()}).records["a"][-1]
    ref = finals[1.5625e-5]
    err = {
        dt: np.sqrt(np.sum(np.abs(finals[dt] - ref) ** 2) * grid.spacing)
        for dt in (1.25e-4, 6.25e-5)
    }
    ratio = err[1.25e-4] / err[6.25e-5]
    checks.append((3.2 <= ratio <= 4.8, f"dt-halving error ratio={ratio:.2f} in 4+-20%"))

    # Free-Gaussian dispersion against the closed form.
    g512 = make_grid(40.0, 512)
    free_v = PotentialField(g512, np.zeros(g512.points))
    psi_g = Wavefunction(g512, np.pi**-0.25 * np.exp(-g512.nodes**2 / 2) + 0j)
    p = EvolveParams(dt=1e-3, t_max=1.0, sample_interval=1.0, g_eff=0.0)
    out = evolve(psi_g, free_v, p, {"a": lambda w: w.amplitudes.copy()}).records["a"][-1]
    t = 1.0
    exact = np.pi**-0.25 / np.sqrt(1 + 1j * t) * np.exp(-g512.nodes**2 / (2 * (1 + 1j * t)))
    free_dev = float(np.max(np.abs(out - exact)))
    checks.append((free_dev < 1e-4, f"free-Gaussian dev={free_dev:.1e} < 1e-4"))

    # Harmonic coherent state: <z>(t) must track z0 cos(t).
    v_h = trap_potential(g512, TrapSpec(quartic_K=0.0))
    psi_c = Wavefunction(g512, np.pi**-0.25 * np.exp(-((g512.nodes - 2.0) ** 2) / 2) + 0j)
    p = EvolveParams(dt=1e-3, t_max=6.3, sample_interval=0.1, g_eff=0.0)
    traj = evolve(psi_c, v_h, p, {"z": lambda w: float(np.sum(
        g512.nodes * np.abs(w.amplitudes) ** 2) * g512.spacing)})
    zs = np.asarray(traj.records["z"])
    coherent_dev = float(np.max(np.abs(zs - 2.0 * np.cos(traj.times))))
    checks.append((coherent_dev < 1e-4, f"coherent <z> dev={coherent_dev:.1e} < 1e-4"))
    _criterion(3, checks)


def test_criterion_4_fidelity_collapse(collapse_curve):
    checks = []
    curve = collapse_curve
    tau_c = critical_time(curve)
    checks.append(
        (tau_c is not None and 30.0 <= tau_c <= 46.0,
         f"tau_c={'none' if tau_c is None else f'{tau_c:.2f}'} in [30, 46]")
    )
    if tau_c is not None:
        early = curve.fidelity[curve.times < 0.8 * tau_c]
        f_min = float(early.min())
        checks.append((f_min > 0.95, f"min F(t<0.8 tau_c)={f_min:.4f} > 0.95"))
    fit = fermi_fit(curve, T_fixed=4.86)
    checks.append(
        (fit.residual_rms < 0.05, f"Fermi-fit(T=4.86) residual_rms={fit.residual_rms:.4f} < 0.05")
    )
    _criterion(4, checks)


def test_criterion_5_amplitude_fidelity_contrast(collapse_curve):
    checks = []
    curve = collapse_curve
    margin = float(np.min(curve.amplitude_fidelity - curve.fidelity))
    checks.append((margin >= -1e-12, f"min(F_a - F)={margin:.2e} >= 0"))
    tau_c = critical_time(curve)
    if tau_c is None:
        checks.append((False, "no 0.6-crossing, cannot probe tau_c + 4.86"))
    else:
        t_probe = tau_c + 4.86
        f_probe = float(np.interp(t_probe, curve.times, curve.fidelity))
        fa_probe = float(np.interp(t_probe, curve.times, curve.amplitude_fidelity))
        checks.append((fa_probe > 0.8, f"F_a(tau_c+4.86)={fa_probe:.3f} > 0.8"))
        checks.append((f_probe < 0.5, f"F(tau_c+4.86)={f_probe:.3f} < 0.5"))
    _criterion(5, checks)


def test_criterion_6_epsilon_scaling(collapse_curve, curve_eps_large, curve_eps_small):
    checks = []
    taus = {
        1e-3: critical_time(curve_eps_large),
        1e-5: critical_time(collapse_curve),
        1e-7: critical_time(curve_eps_small),
    }
    reached = all(t is not None for t in taus.values())
    checks.append(
        (reached, "crossings at " + ", ".join(
            f"eps={e:g}: {'none' if t is None else f'{t:.2f}'}" for e, t in taus.items()))
    )
    if reached:
        checks.append(
            (taus[1e-3] < taus[1e-5] < taus[1e-7], "tau_c increases as eps decreases")
        )
        fit = scaling_fit_epsilon(sorted(taus.items()))
        checks.append(
            (abs(fit.slope - 3.3) <= 0.25 * 3.3, f"slope t0={fit.slope:.3f} vs 3.3+-25%")
        )
        checks.append((fit.r_squared > 0.9, f"r^2={fit.r_squared:.4f} > 0.9"))
    _criterion(6, checks)


def test_criterion_7_natoms_scaling(collapse_curve, curve_na_small, curve_na_mid, curve_linear):
    checks = []
    taus = {
        2e4: critical_time(curve_na_small),
        5e4: critical_time(curve_na_mid),
        1e5: critical_time(collapse_curve),
    }
    reached = all(t is not None for t in taus.values())
    checks.append(
        (reached, "crossings at " + ", ".join(
            f"N_A={n:g}: {'none' if t is None else f'{t:.2f}'}" for n, t in taus.items()))
    )
    if reached:
        checks.append(
            (taus[2e4] > taus[5e4] > taus[1e5], "tau_c strictly decreasing in N_A")
        )
        fit = scaling_fit_natoms(sorted(taus.items()))
        checks.append((fit.slope < 0, f"log-fit slope={fit.slope:.2f} < 0"))
        checks.append((fit.r_squared > 0.8, f"r^2={fit.r_squared:.4f} > 0.8"))
    tau_lin = critical_time(curve_linear)
    f_floor = float(curve_linear.fidelity.min())
    checks.append(
        (tau_lin is None,
         f"linear (g_eff=0) has no 0.6-crossing for t<=60 (min F={f_floor:.6f})")
    )
    _criterion(7, checks)


def test_criterion_8_fit_robustness():
    checks = []
    t = np.arange(0.0, 60.0 + 0.05, 0.1)
    truth = dict(tau_c=38.0, T=4.86, f_inf=0.2)
    f = fermi_curve(t, **truth)
    clean = EchoCurve(times=t, fidelity=f, amplitude_fidelity=np.sqrt(f), n_pairs=1)
    fit = fermi_fit(clean)
    devs = {
        "tau_c": abs(fit.tau_c - truth["tau_c"]) / truth["tau_c"],
        "T": abs(fit.T - truth["T"]) / truth["T"],
        "f_inf": abs(fit.f_inf - truth["f_inf"]) / truth["f_inf"],
    }
    worst = max(devs, key=devs.get)
    checks.append(
        (max(devs.values()) < 1e-6, f"noiseless max rel dev={devs[worst]:.1e} ({worst}) < 1e-6")
    )

    errs = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        noisy = EchoCurve(
            times=t,
            fidelity=f + 0.01 * rng.standard_normal(t.size),
            amplitude_fidelity=np.sqrt(f),
            n_pairs=1,
        )
        errs.append(abs(fermi_fit(noisy).tau_c - truth["tau_c"]))
    checks.append(
        (max(errs) <= 0.3, f"1% noise: max |tau_c err| over 100 seeds={max(errs):.3f} <= 0.3")
    )
    _criterion(8, checks)


def test_criterion_9_manifest_replay_determinism(tmp_path):
    checks = []
    raw = {
        "mode": "sweep-epsilon",
        "sweep_values": [1e-3, 1e-4],
        "grid_points": 256,
        "n_realizations": 3,
        "n_atoms": 1e3,
        "dt": 5e-4,
        "t_max": 1.0,
        "sample_interval": 0.5,
        "displacement": 2.0,
    }
    first = tmp_path / "first"
    run_campaign(resolve_config(raw), workers=1, out_dir=first)
    names = sorted(p.name for p in first.iterdir() if p.name != "run_manifest.json")

    from gpe_echo.config import load_config

    identical = True
    for workers in (2, 3):
        out = tmp_path / f"replay_w{workers}"
        run_campaign(load_config(first / "run_manifest.json"), workers=workers, out_dir=out)
        for name in names:
            if (first / name).read_bytes() != (out / name).read_bytes():
                identical = False
                checks.append((False, f"{name} differs on replay at workers={workers}"))
    checks.append(
        (identical, f"{len(names)} artifacts byte-identical on manifest replay at workers 2 and 3")
    )
    _criterion(9, checks)
