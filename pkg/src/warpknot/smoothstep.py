"""C-infinity step functions built from the exp(-1/x) mollifier.

``smooth_step`` is the classical bump-quotient step: identically 0 for
y <= 0, identically 1 for y >= 1, strictly increasing in between, all
derivatives vanishing at both ends.  Its peak slope is about 1.91, which
wastes capacity when a transition must respect a pointwise slope budget,
so ``flat_step`` provides a trapezoid variant: the running integral of a
mollified indicator of [0, 1], normalised to end at 1.  Its slope plateaus
at 1/(1 - FLAT_MARGIN) ~ 1.087.
"""

import numpy as np

FLAT_MARGIN = 0.08

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _bump_exp(y):
    """exp(-1/y) for y > 0, extended by zero; vectorized."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 1e-14
    out[pos] = np.exp(-1.0 / y[pos])
    return out


def smooth_step(y):
    y = np.asarray(y, dtype=float)
    a = _bump_exp(y)
    b = _bump_exp(1.0 - y)
    return a / (a + b)


def smooth_step_deriv(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    ins = (y > 1e-12) & (y < 1.0 - 1e-12)
    yi = y[ins]
    a = np.exp(-1.0 / yi)
    b = np.exp(-1.0 / (1.0 - yi))
    ap = a / yi**2
    bp = -b / (1.0 - yi) ** 2
    out[ins] = (ap * b - a * bp) / (a + b) ** 2
    return out


def _step_cumulative(tau):
    """integral_0^tau smooth_step(u) du for tau in [0, 1], via 32-pt GL."""
    tau = np.asarray(tau, dtype=float)
    u = 0.5 * tau[..., None] * (_GL_NODES + 1.0)
    return 0.5 * tau * np.sum(_GL_WEIGHTS * smooth_step(u), axis=-1)


_HALF = float(_step_cumulative(np.float64(1.0)))  # 1/2 by the step's symmetry
_FLAT_NORM = 2.0 * FLAT_MARGIN * _HALF + 1.0 - 2.0 * FLAT_MARGIN  # = 1 - FLAT_MARGIN


def flat_step(y):
    """Low-gain C-infinity step: 0 below 0, 1 above 1, peak slope ~1.087."""
    y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
    out = np.empty_like(y)
    eps = FLAT_MARGIN
    lo = y <= eps
    hi = y >= 1.0 - eps
    mid = ~(lo | hi)
    out[lo] = eps * _step_cumulative(y[lo] / eps)
    out[mid] = eps * _HALF + (y[mid] - eps)
    out[hi] = eps * _HALF + (1.0 - 2.0 * eps) + eps * (_HALF - _step_cumulative((1.0 - y[hi]) / eps))
    return out / _FLAT_NORM


def flat_step_deriv(y):
    y = np.asarray(y, dtype=float)
    eps = FLAT_MARGIN
    return smooth_step(y / eps) * smooth_step((1.0 - y) / eps) / _FLAT_NORM
