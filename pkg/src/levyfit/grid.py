"""Uniform spatial grids and grid-aligned densities."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid1D:
    """``m`` uniformly spaced nodes from ``a`` to ``b`` inclusive."""

    a: float
    b: float
    m: int

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or not self.a < self.b:
            raise ValueError(f"grid needs finite a < b, got ({self.a}, {self.b})")
        if int(self.m) != self.m or self.m < 3:
            raise ValueError(f"grid needs m >= 3 nodes, got {self.m}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "m", int(self.m))

    @classmethod
    def from_spacing(cls, a: float, b: float, spacing: float) -> "Grid1D":
        n = (b - a) / spacing
        m = int(round(n)) + 1
        if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
            raise ValueError(f"spacing {spacing} does not divide ({a}, {b}) evenly")
        return cls(a, b, m)

    @property
    def spacing(self) -> float:
        return (self.b - self.a) / (self.m - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.m)

    def trapezoid(self, values: np.ndarray) -> float:
        v = np.asarray(values, dtype=float)
        return float(self.spacing * (v.sum() - 0.5 * (v[0] + v[-1])))

    def same_as(self, other: "Grid1D", rtol: float = 1e-12) -> bool:
        scale = max(abs(self.a), abs(self.b), 1.0)
        return (
            self.m == other.m
            and abs(self.a - other.a) <= rtol * scale
            and abs(self.b - other.b) <= rtol * scale
        )

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "m": self.m}


class GridMismatchError(ValueError):
    pass


@dataclass
class Density:
    """Density values on the nodes of a :class:`Grid1D`.

    ``meta`` carries provenance (bandwidth, solver diagnostics, ...).
    Values are not forced to be nonnegative here; solver output may carry
    round-off negatives that callers are expected to inspect.
    """

    grid: Grid1D
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.m,):
            raise ValueError(f"expected {self.grid.m} values, got shape {self.values.shape}")

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def mass(self) -> float:
        return self.grid.trapezoid(self.values)

    def normalized(self) -> "Density":
        total = self.mass()
        if total <= 0:
            raise ValueError("cannot normalise a density with nonpositive mass")
        return Density(self.grid, self.values / total, dict(self.meta, normalized_from_mass=total))


def check_same_grid(p: Density, q: Density) -> None:
    if not p.grid.same_as(q.grid):
        raise GridMismatchError(f"densities live on different grids: {p.grid} vs {q.grid}")


def write_density_csv(density: Density, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "p"])
        for x, p in zip(density.x, density.values):
            w.writerow([f"{x:.17g}", f"{p:.17g}"])


def read_density_csv(path: str | os.PathLike) -> Density:
    """Read a ``x,p`` CSV written by :func:`write_density_csv`.

    The nodes must be uniformly spaced; the grid is rebuilt from the first
    and last abscissae.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["x", "p"]:
        raise ValueError(f"{path}: expected header 'x,p'")
    data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    if data.shape[0] < 3:
        raise ValueError(f"{path}: need at least 3 rows, got {data.shape[0]}")
    grid = Grid1D(data[0, 0], data[-1, 0], data.shape[0])
    if np.max(np.abs(grid.nodes - data[:, 0])) > 1e-9 * max(1.0, abs(grid.b - grid.a)):
        raise ValueError(f"{path}: abscissae are not uniformly spaced")
    return Density(grid, data[:, 1])
