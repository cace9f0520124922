"""Critical-time extraction, Fermi-curve fitting, and scaling regressions.

The decay is modeled by the Fermi-like sigmoid
    f(t) = (1 - f_inf) / (1 + exp((t - tau_c)/T)) + f_inf
whose plateau is 1, floor f_inf, center tau_c, and width T. The primary
critical-time estimator is the direct first crossing of 0.6*max(F) (the
definition used to read the simulation curves); the fitted tau_c is
reported alongside, the two differ by O(T*f_inf).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import least_squares
from scipy.special import expit


def fermi_curve(t, tau_c, T, f_inf):
    """Evaluate the Fermi-like decay model (stable for large |t-tau_c|/T)."""
    t = np.asarray(t, dtype=float)
    return (1.0 - f_inf) * expit(-(t - tau_c) / T) + f_inf


@dataclass(frozen=True)
class FermiFitResult:
    tau_c: float
    T: float
    f_inf: float
    residual_rms: float
    T_was_fixed: bool


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    points: tuple  # ((abscissa, tau_c), ...)


def critical_time(curve):
    """First downward crossing of 0.6 * max(F), linearly interpolated.

    Returns None when the curve never reaches the threshold ("not reached").
    """
    t = np.asarray(curve.times, dtype=float)
    f = np.asarray(curve.fidelity, dtype=float)
    if len(t) == 0:
        raise ValueError("empty curve")
    threshold = 0.6 * f.max()
    below = np.nonzero(f < threshold)[0]
    if len(below) == 0:
        return None
    i = int(below[0])
    if i == 0:
        return float(t[0])
    frac = (threshold - f[i - 1]) / (f[i] - f[i - 1])
    return float(t[i - 1] + frac * (t[i] - t[i - 1]))


def _width_guess(t, f):
    """Crude decay-width scale from the 75%/25% levels of the drop."""
    lo, hi = f.min(), f.max()
    span = hi - lo
    if span <= 0:
        return 1.0
    hi_cross = np.nonzero(f < lo + 0.75 * span)[0]
    lo_cross = np.nonzero(f < lo + 0.25 * span)[0]
    if len(hi_cross) == 0 or len(lo_cross) == 0:
        return 1.0
    width = (t[lo_cross[0]] - t[hi_cross[0]]) / 2.2
    return float(width) if width > 0 else 1.0


def fermi_fit(curve, T_fixed=None):
    """Least-squares fit of the Fermi model to a fidelity curve.

    With T_fixed given (typically the classical oscillation period), only
    (tau_c, f_inf) are free; otherwise all of (tau_c, T, f_inf) are free.
    The curve must actually span the collapse: values both above 0.9 and
    below 0.6*max are required.
    """
    from .errors import FitError

    t = np.asarray(curve.times, dtype=float)
    f = np.asarray(curve.fidelity, dtype=float)
    if not (np.any(f > 0.9) and np.any(f < 0.6 * f.max())):
        raise FitError("curve does not span the collapse (needs F > 0.9 and F < 0.6*max)")

    tau0 = critical_time(curve)
    tail = f[int(np.ceil(0.9 * len(f))):]
    f_inf0 = float(np.clip(tail.mean() if len(tail) else f[-1], 0.0, 0.9))
    span = t[-1] - t[0]

    if T_fixed is not None:
        if not T_fixed > 0:
            raise FitError(f"T_fixed must be positive, got {T_fixed}")

        def residuals(p):
            return fermi_curve(t, p[0], T_fixed, p[1]) - f

        x0 = [tau0, f_inf0]
        lower = [t[0] - span, 0.0]
        upper = [t[-1] + span, 1.0 - 1e-12]
    else:
        T0 = _width_guess(t, f)

        def residuals(p):
            return fermi_curve(t, p[0], p[1], p[2]) - f

        x0 = [tau0, T0, f_inf0]
        lower = [t[0] - span, 1e-9, 0.0]
        upper = [t[-1] + span, 10 * span, 1.0 - 1e-12]

    sol = least_squares(
        residuals, x0, bounds=(lower, upper), method="trf", ftol=1e-10, xtol=1e-12,
        max_nfev=500,
    )
    if not sol.success:
        raise FitError(f"Fermi fit did not converge: {sol.message}")
    rms = float(np.sqrt(np.mean(sol.fun**2)))
    if T_fixed is not None:
        return FermiFitResult(float(sol.x[0]), float(T_fixed), float(sol.x[1]), rms, True)
    return FermiFitResult(float(sol.x[0]), float(sol.x[1]), float(sol.x[2]), rms, False)


def _linear_fit(x, y, points):
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-30 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return ScalingFit(float(slope), float(intercept), r2, tuple(points))


def scaling_fit_epsilon(records):
    """OLS of tau_c against -ln(eps); the slope estimates t_0."""
    records = [(float(e), float(tc)) for e, tc in records]
    if len({e for e, _ in records}) < 3:
        raise ValueError("need >= 3 records with distinct epsilon")
    x = -np.log([e for e, _ in records])
    y = np.array([tc for _, tc in records])
    if np.ptp(x) == 0:
        raise ValueError("degenerate abscissas")
    return _linear_fit(x, y, records)


def scaling_fit_natoms(records):
    """OLS of tau_c against ln(N_A); the log regime needs N_A >= 2e4."""
    records = [(float(n), float(tc)) for n, tc in records]
    if len(records) < 3:
        raise ValueError("need >= 3 records")
    small = [n for n, _ in records if n < 2e4]
    if small:
        raise ValueError(f"records below the log regime N_A >= 2e4: {small}")
    x = np.log([n for n, _ in records])
    y = np.array([tc for _, tc in records])
    if np.ptp(x) == 0:
        raise ValueError("degenerate abscissas")
    return _linear_fit(x, y, records)
