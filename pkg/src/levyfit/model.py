"""Drift models and parameter points for ``dX = f(X, theta) dt + epsilon dL``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stable import check_alpha

DRIFT_KINDS = ("cubic", "linear", "polynomial")


@dataclass(frozen=True)
class DriftModel:
    """Polynomial drift ``f(x, theta) = sum(base[k] x^k) + theta * sum(theta_coeffs[k] x^k)``.

    ``cubic`` is ``-theta x^3 + x`` and ``linear`` is ``-theta x`` (the
    Ornstein-Uhlenbeck drift).  ``polynomial`` takes explicit ascending
    coefficient tuples.
    """

    kind: str = "cubic"
    base: tuple[float, ...] = ()
    theta_coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in DRIFT_KINDS:
            raise ValueError(f"unknown drift kind {self.kind!r}; expected one of {DRIFT_KINDS}")
        if self.kind == "cubic":
            object.__setattr__(self, "base", (0.0, 1.0))
            object.__setattr__(self, "theta_coeffs", (0.0, 0.0, 0.0, -1.0))
        elif self.kind == "linear":
            object.__setattr__(self, "base", ())
            object.__setattr__(self, "theta_coeffs", (0.0, -1.0))
        else:
            base = tuple(float(c) for c in self.base)
            tc = tuple(float(c) for c in self.theta_coeffs)
            if not all(np.isfinite(base + tc)):
                raise ValueError("polynomial drift coefficients must be finite")
            object.__setattr__(self, "base", base)
            object.__setattr__(self, "theta_coeffs", tc)

    def __call__(self, x, theta: float):
        """Evaluate the drift at ``x`` (scalar or array)."""
        x = np.asarray(x, dtype=float)
        return _polyval(self.base, x) + theta * _polyval(self.theta_coeffs, x)

    def scalar(self, theta: float):
        """Return a fast float -> float callable for the fixed ``theta``."""
        n = max(len(self.base), len(self.theta_coeffs))
        coeffs = [0.0] * n
        for k, c in enumerate(self.base):
            coeffs[k] += c
        for k, c in enumerate(self.theta_coeffs):
            coeffs[k] += theta * c
        if self.kind == "cubic":
            return lambda x: x - theta * x * x * x
        coeffs = coeffs[::-1]

        def f(x):
            acc = 0.0
            for c in coeffs:
                acc = acc * x + c
            return acc

        return f

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "polynomial":
            d["base"] = list(self.base)
            d["theta_coeffs"] = list(self.theta_coeffs)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DriftModel":
        return cls(d.get("kind", "cubic"), tuple(d.get("base", ())), tuple(d.get("theta_coeffs", ())))


def _polyval(coeffs, x):
    out = np.zeros_like(x)
    for c in reversed(coeffs):
        out = out * x + c
    return out


PARAM_NAMES = ("theta", "alpha", "epsilon")


@dataclass(frozen=True)
class ParamPoint:
    """A candidate ``(theta, alpha, epsilon)``; alpha in (0, 2), epsilon in (0, 1]."""

    theta: float
    alpha: float
    epsilon: float

    def __post_init__(self):
        check_alpha(self.alpha)
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon!r}")
        if not np.isfinite(self.theta):
            raise ValueError("theta must be finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.theta, self.alpha, self.epsilon)

    def to_dict(self) -> dict:
        return {"theta": self.theta, "alpha": self.alpha, "epsilon": self.epsilon}
