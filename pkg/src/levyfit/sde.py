"""Euler-Maruyama simulation of ``dX = f(X, theta) dt + epsilon dL^alpha`` and trajectory files."""

from __future__ import annotations

import csv
import math
import os
import struct
from dataclasses import dataclass

import numpy as np

from .model import DriftModel
from .stable import check_alpha, make_rng, sample_standard

MAGIC = b"LVYTRAJ\0"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sHQdd")  # magic, version, n, dt, x0


class SimulationOverflowError(ArithmeticError):
    """The explicit scheme produced a non-finite state."""

    def __init__(self, step: int, message: str | None = None):
        super().__init__(message or f"state became non-finite at step {step}")
        self.step = step


class TrajectoryFormatError(ValueError):
    pass


@dataclass
class Trajectory:
    """Observations ``values`` taken every ``dt`` time units, starting from ``x0``."""

    values: np.ndarray
    dt: float
    x0: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("a trajectory needs at least 2 observations")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trajectory values must be finite")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    def __len__(self):
        return self.values.size

    def summary(self, a: float | None = None, b: float | None = None) -> dict:
        v = self.values
        out = {
            "n": int(v.size),
            "dt": self.dt,
            "x0": self.x0,
            "mean": float(v.mean()),
            "s": float(v.std(ddof=1)),
            "min": float(v.min()),
            "max": float(v.max()),
        }
        if a is not None and b is not None:
            out["below_a"] = int(np.count_nonzero(v <= a))
            out["above_b"] = int(np.count_nonzero(v >= b))
        return out


def simulate(drift: DriftModel, theta: float, alpha: float, epsilon: float, x0: float,
             dt: float, n: int, seed: int | None = None, substeps: int = 1) -> Trajectory:
    """Simulate ``n`` observations of the SDE with the Euler-Maruyama scheme.

    ``X_{k+1} = X_k + f(X_k) h + epsilon h^(1/alpha) xi_k`` with ``h = dt / substeps``
    and ``xi_k`` standard symmetric alpha-stable; every ``substeps``-th state is
    recorded, so observations are ``dt`` apart.  The first observation is the
    state after one observation interval (``x0`` itself is not recorded).

    A cubic drift makes explicit Euler unstable once ``theta x^2 h > 2``; rare
    large jumps can get there, in which case :class:`SimulationOverflowError`
    is raised with the offending step.  Smaller ``h`` (more substeps) makes
    this exponentially rarer.
    """
    alpha = check_alpha(alpha)
    if not dt > 0:
        raise ValueError("dt must be positive")
    if int(n) < 2:
        raise ValueError("n must be >= 2")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    substeps = int(substeps)
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    n = int(n)
    h = dt / substeps
    noise_scale = epsilon * h ** (1.0 / alpha)
    f = drift.scalar(theta)
    rng = make_rng(seed)

    out = np.empty(n)
    x = float(x0)
    isfinite = math.isfinite
    chunk = max(1, min(n, 2**16 // substeps + 1))
    k = 0
    step = 0
    while k < n:
        m = min(chunk, n - k)
        if epsilon > 0:
            noise = (noise_scale * sample_standard(alpha, m * substeps, rng)).tolist()
        else:
            noise = [0.0] * (m * substeps)
        j = 0
        for i in range(m):
            for _ in range(substeps):
                x = x + f(x) * h + noise[j]
                j += 1
            step += substeps
            if not isfinite(x):
                raise SimulationOverflowError(step)
            out[k + i] = x
        k += m
    return Trajectory(out, dt, float(x0))


def save_trajectory(traj: Trajectory, path: str | os.PathLike) -> None:
    """Binary format: header (magic, u16 version, u64 n, f64 dt, f64 x0) then n little-endian f64."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, len(traj), traj.dt, traj.x0))
        fh.write(traj.values.astype("<f8").tobytes())


def load_trajectory(path: str | os.PathLike) -> Trajectory:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise TrajectoryFormatError(f"{path}: file too short for a trajectory header")
        magic, version, n, dt, x0 = _HEADER.unpack(head)
        if magic != MAGIC:
            raise TrajectoryFormatError(f"{path}: not a trajectory file (bad magic)")
        if version != FORMAT_VERSION:
            raise TrajectoryFormatError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
        body = fh.read()
    if len(body) != 8 * n:
        raise TrajectoryFormatError(f"{path}: expected {n} values, found {len(body) / 8:g} (truncated?)")
    try:
        return Trajectory(np.frombuffer(body, dtype="<f8").astype(np.float64), dt, x0)
    except ValueError as exc:
        raise TrajectoryFormatError(f"{path}: {exc}") from exc


def export_csv(traj: Trajectory, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "value"])
        for i, v in enumerate(traj.values):
            w.writerow([i, f"{v:.17g}"])
