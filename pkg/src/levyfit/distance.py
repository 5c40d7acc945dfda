"""Discrepancies between a model density and an empirical density on a shared grid."""

from __future__ import annotations

import numpy as np

from .grid import Density, check_same_grid

NEGATIVE_TOL = 1e-8

OBJECTIVES = ("hellinger", "relative-l2", "absolute-sup")
# selection rule per objective; the sup-norm error is maximised by convention
SELECT = {"hellinger": "argmin", "relative-l2": "argmin", "absolute-sup": "argmax"}


class NegativeDensityError(ValueError):
    pass


def _clamped_sqrt(d: Density) -> tuple[np.ndarray, int]:
    v = d.values
    if v.size and v.min() < -NEGATIVE_TOL:
        raise NegativeDensityError(f"density value {v.min():.3g} is below -{NEGATIVE_TOL:g}")
    neg = int(np.count_nonzero(v < 0))
    return np.sqrt(np.maximum(v, 0.0)), neg


def hellinger_sq(p: Density, q: Density, diagnostics: dict | None = None) -> float:
    """Squared Hellinger distance ``1/2 int (sqrt p - sqrt q)^2`` by the trapezoid rule.

    Round-off negatives down to -1e-8 are clamped to zero; their count is
    written to ``diagnostics['clamped']`` when a dict is passed.
    """
    check_same_grid(p, q)
    sp, n_p = _clamped_sqrt(p)
    sq, n_q = _clamped_sqrt(q)
    if diagnostics is not None:
        diagnostics["clamped"] = n_p + n_q
    return 0.5 * p.grid.trapezoid((sp - sq) ** 2)


def hellinger(p: Density, q: Density) -> float:
    return float(np.sqrt(hellinger_sq(p, q)))


def relative_l2(p: Density, q: Density) -> float:
    """``||p - q||^2 / ||q||^2`` with trapezoid-rule norms."""
    check_same_grid(p, q)
    denom = q.grid.trapezoid(q.values**2)
    if denom == 0:
        raise ZeroDivisionError("reference density is identically zero")
    return p.grid.trapezoid((p.values - q.values) ** 2) / denom


def absolute_sup(p: Density, q: Density) -> float:
    check_same_grid(p, q)
    return float(np.max(np.abs(p.values - q.values)))


def objective(kind: str, p: Density, q: Density) -> float:
    if kind == "hellinger":
        return hellinger_sq(p, q)
    if kind == "relative-l2":
        return relative_l2(p, q)
    if kind == "absolute-sup":
        return absolute_sup(p, q)
    raise ValueError(f"unknown objective {kind!r}; expected one of {OBJECTIVES}")
