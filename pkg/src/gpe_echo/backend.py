"""Pointwise kernels for the split-step propagator, with optional numba JIT.

The FFT half of a split step is a vectorized numpy call and gains nothing
from JIT; the position-space nonlinear phase kick does, because the naive
numpy form materializes several temporaries per step and the propagator
calls it twice per step, millions of times per campaign.

Set ``GPE_ECHO_NO_NUMBA=1`` to force the pure-numpy implementations (the
results are identical to floating-point roundoff; see benchmarks/).
"""

import os

import numpy as np

_DISABLED = os.environ.get("GPE_ECHO_NO_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def _phase_kick_numpy(psi, v, g_eff, dt):
    """psi *= exp(-i*(v + g_eff*|psi|^2)*dt), in place."""
    dens = psi.real**2 + psi.imag**2
    psi *= np.exp(-1j * dt * (v + g_eff * dens))


def _decay_kick_numpy(psi, v, g_eff, dt):
    """psi *= exp(-(v + g_eff*|psi|^2)*dt), in place (imaginary time)."""
    dens = psi.real**2 + psi.imag**2
    psi *= np.exp(-dt * (v + g_eff * dens))


if HAS_NUMBA:

    @njit(cache=True, nogil=True, fastmath=True)
    def _phase_kick_numba(psi, v, g_eff, dt):
        for i in range(psi.shape[0]):
            re = psi[i].real
            im = psi[i].imag
            ph = -dt * (v[i] + g_eff * (re * re + im * im))
            c = np.cos(ph)
            s = np.sin(ph)
            psi[i] = complex(re * c - im * s, re * s + im * c)

    @njit(cache=True, nogil=True, fastmath=True)
    def _decay_kick_numba(psi, v, g_eff, dt):
        for i in range(psi.shape[0]):
            re = psi[i].real
            im = psi[i].imag
            f = np.exp(-dt * (v[i] + g_eff * (re * re + im * im)))
            psi[i] = complex(re * f, im * f)

    phase_kick = _phase_kick_numba
    decay_kick = _decay_kick_numba
    BACKEND = "numba"
else:
    phase_kick = _phase_kick_numpy
    decay_kick = _decay_kick_numpy
    BACKEND = "numpy"
