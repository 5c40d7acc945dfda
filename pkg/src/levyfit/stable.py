"""Symmetric alpha-stable constants and random variates.

The standard symmetric law used throughout has characteristic function
``exp(-|xi|**alpha)``.  This is the law of ``L(1)`` for the pure-jump Levy
process with triplet ``(0, 0, nu)``, ``nu(dy) = c_alpha(alpha) |y|^(-1-alpha) dy``,
so the simulator (increments ``dt**(1/alpha) * xi``) and the Fokker-Planck
solver (jump kernel weighted by ``c_alpha``) describe the same noise.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gamma


def check_alpha(alpha: float) -> float:
    """Return ``alpha`` as a float, raising ``ValueError`` outside (0, 2)."""
    alpha = float(alpha)
    if not (0.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in the open interval (0, 2), got {alpha!r}")
    return alpha


def c_alpha(alpha: float) -> float:
    """Normalising constant of the symmetric alpha-stable jump measure.

    ``C = alpha * Gamma((1 + alpha)/2) / (2**(1 - alpha) * sqrt(pi) * Gamma(1 - alpha/2))``
    """
    alpha = check_alpha(alpha)
    return float(
        alpha
        * gamma((1.0 + alpha) / 2.0)
        / (2.0 ** (1.0 - alpha) * math.sqrt(math.pi) * gamma(1.0 - alpha / 2.0))
    )


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def sample_standard(alpha: float, count: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Draw ``count`` standard symmetric alpha-stable variates.

    Uses the Chambers-Mallows-Stuck transform of a uniform angle on
    (-pi/2, pi/2) and a unit exponential.  ``seed`` may be an int or an
    existing ``numpy.random.Generator`` (which is advanced in place).
    """
    alpha = check_alpha(alpha)
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = make_rng(seed)
    v = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size=count)
    w = rng.standard_exponential(size=count)
    return cms_transform(alpha, v, w)


def cms_transform(alpha: float, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Map uniform angles ``v`` and exponentials ``w`` to SaS(alpha) variates."""
    if alpha == 1.0:
        return np.tan(v)
    cos_v = np.cos(v)
    return (
        np.sin(alpha * v)
        / cos_v ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha)
    )


def tail_slope(samples: np.ndarray, y_lo: float = 10.0, y_hi: float = 100.0, num: int = 25) -> float:
    """Least-squares slope of log P(|X| > y) against log y on [y_lo, y_hi].

    For an alpha-stable sample this approaches ``-alpha``.
    """
    a = np.sort(np.abs(np.asarray(samples, dtype=float)))
    ys = np.geomspace(y_lo, y_hi, num)
    surv = 1.0 - np.searchsorted(a, ys, side="right") / a.size
    keep = surv > 0
    if keep.sum() < 2:
        raise ValueError("too few exceedances to fit a tail slope")
    slope, _ = np.polyfit(np.log(ys[keep]), np.log(surv[keep]), 1)
    return float(slope)
