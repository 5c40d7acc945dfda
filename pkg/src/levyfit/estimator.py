"""Exhaustive grid search of the objective over a parameter space.

Each grid point needs one Fokker-Planck solve.  Points are independent, so a
sweep can be spread over a process pool; results are gathered back into grid
order, which keeps the outcome independent of the worker count.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import distance
from .fpsolver import SolverConfig, solve
from .grid import Density, check_same_grid
from .model import PARAM_NAMES, DriftModel, ParamPoint

_BOUNDS = {"theta": (-np.inf, np.inf), "alpha": (0.0, 2.0), "epsilon": (0.0, 1.0)}


@dataclass(frozen=True)
class Fixed:
    value: float

    def nodes(self) -> np.ndarray:
        return np.array([float(self.value)])


@dataclass(frozen=True)
class Range:
    """Grid from ``lo`` to ``hi``: either ``count`` evenly spaced nodes or steps of ``step``.

    With ``step`` the last node is the largest ``lo + k*step`` not above ``hi``.
    """

    lo: float
    hi: float
    step: float | None = None
    count: int | None = None

    def __post_init__(self):
        if (self.step is None) == (self.count is None):
            raise ValueError("give exactly one of step or count")
        if not self.lo < self.hi:
            raise ValueError(f"range needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if len(self.nodes()) < 2:
            raise ValueError("a range must contain at least 2 grid nodes")

    def nodes(self) -> np.ndarray:
        if self.count is not None:
            return np.round(np.linspace(self.lo, self.hi, int(self.count)), 12)
        k = int(np.floor((self.hi - self.lo) / self.step + 1e-9))
        return np.round(self.lo + self.step * np.arange(k + 1), 12)


def _coord_from_dict(d) -> Fixed | Range:
    if isinstance(d, (int, float)):
        return Fixed(float(d))
    if "value" in d:
        return Fixed(float(d["value"]))
    return Range(float(d["lo"]), float(d["hi"]), d.get("step"), d.get("count"))


def _coord_to_dict(c: Fixed | Range) -> dict:
    if isinstance(c, Fixed):
        return {"value": c.value}
    out = {"lo": c.lo, "hi": c.hi}
    if c.step is not None:
        out["step"] = c.step
    else:
        out["count"] = c.count
    return out


@dataclass(frozen=True)
class ParamSpace:
    theta: Fixed | Range
    alpha: Fixed | Range
    epsilon: Fixed | Range

    def __post_init__(self):
        coords = self.coords()
        if not any(isinstance(c, Range) for c in coords.values()):
            raise ValueError("parameter space needs at least one RANGE coordinate")
        for name, c in coords.items():
            lo, hi = _BOUNDS[name]
            nodes = c.nodes()
            ok = (nodes > lo) & ((nodes <= hi) if name == "epsilon" else (nodes < hi))
            if not np.all(ok) or not np.all(np.isfinite(nodes)):
                raise ValueError(f"{name} grid leaves its admissible range: {nodes[~ok]}")

    def coords(self) -> dict:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    @property
    def range_names(self) -> list[str]:
        return [n for n, c in self.coords().items() if isinstance(c, Range)]

    @property
    def axes(self) -> dict[str, np.ndarray]:
        return {n: getattr(self, n).nodes() for n in self.range_names}

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.axes.values())

    def points(self) -> list[ParamPoint]:
        """All grid points in row-major order over (theta, alpha, epsilon)."""
        grids = [getattr(self, n).nodes() for n in PARAM_NAMES]
        return [ParamPoint(*map(float, combo)) for combo in product(*grids)]

    def to_dict(self) -> dict:
        return {n: _coord_to_dict(c) for n, c in self.coords().items()}

    @classmethod
    def from_dict(cls, d: dict) -> "ParamSpace":
        return cls(**{n: _coord_from_dict(d[n]) for n in PARAM_NAMES})


@dataclass
class Region:
    """Grid points with objective at or below ``threshold`` and their bounding box."""

    threshold: float
    names: list[str]
    points: list[tuple[float, ...]]
    box: dict[str, tuple[float, float]]

    def contains(self, point: dict | ParamPoint) -> bool:
        if isinstance(point, ParamPoint):
            point = point.to_dict()
        key = tuple(round(float(point[n]), 12) for n in self.names)
        return key in {tuple(round(v, 12) for v in p) for p in self.points}

    def box_contains(self, **coords) -> bool:
        return all(self.box[n][0] <= v <= self.box[n][1] for n, v in coords.items())

    def interval(self) -> tuple[float, float]:
        if len(self.names) != 1:
            raise ValueError("interval() is only defined for one-dimensional sweeps")
        return self.box[self.names[0]]

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "box": {n: list(v) for n, v in self.box.items()},
            "points": [list(p) for p in self.points],
        }


class EmptyRegionError(ValueError):
    pass


@dataclass
class SweepResult:
    objective: str
    space: ParamSpace
    values: np.ndarray  # shape == space.shape, NaN where the solve failed
    failures: list[dict]
    drift: dict
    solver: dict
    normalize: bool
    selection: str = "argmin"
    regions: list[Region] = field(default_factory=list)
    diagnostics: list[dict | None] = field(default_factory=list)  # per point, row-major

    @property
    def names(self) -> list[str]:
        return self.space.range_names

    def _best_flat(self, selection: str | None = None) -> int:
        selection = selection or self.selection
        v = self.values.ravel()
        if np.all(np.isnan(v)):
            raise ValueError("every grid point failed; no estimate available")
        # nanargmin/nanargmax return the first (smallest-index) optimum
        return int(np.nanargmin(v) if selection == "argmin" else np.nanargmax(v))

    def best(self, selection: str | None = None) -> tuple[ParamPoint, float]:
        flat = self._best_flat(selection)
        idx = np.unravel_index(flat, self.values.shape)
        return self.point_at(idx), float(self.values.ravel()[flat])

    @property
    def best_point(self) -> ParamPoint:
        return self.best()[0]

    @property
    def best_value(self) -> float:
        return self.best()[1]

    def point_at(self, idx) -> ParamPoint:
        d = self.space.to_dict()
        coords = {n: d[n]["value"] for n in PARAM_NAMES if "value" in d[n]}
        axes = self.space.axes
        for name, i in zip(self.names, idx):
            coords[name] = float(axes[name][i])
        return ParamPoint(**coords)

    def sublevel_region(self, threshold: float) -> Region:
        """Grid points with value <= ``threshold`` (failed points excluded)."""
        lowest = float(np.nanmin(self.values))
        if threshold < lowest:
            raise EmptyRegionError(f"threshold {threshold:g} is below the minimum {lowest:g}")
        axes = self.space.axes
        hits = np.argwhere(np.nan_to_num(self.values, nan=np.inf) <= threshold)
        pts = [tuple(float(axes[n][i]) for n, i in zip(self.names, row)) for row in hits]
        arr = np.array(pts)
        box = {n: (float(arr[:, k].min()), float(arr[:, k].max())) for k, n in enumerate(self.names)}
        region = Region(float(threshold), list(self.names), pts, box)
        self.regions.append(region)
        return region

    def to_dict(self) -> dict:
        point, value = self.best()
        flat = self._best_flat()
        return {
            "objective": self.objective,
            "selection": self.selection,
            "normalize": self.normalize,
            "space": self.space.to_dict(),
            "axes": {n: v.tolist() for n, v in self.space.axes.items()},
            "shape": list(self.values.shape),
            "values": [None if np.isnan(v) else float(v) for v in self.values.ravel()],
            "best": {
                "point": point.to_dict(),
                "index": [int(i) for i in np.unravel_index(flat, self.values.shape)],
                "value": value,
            },
            "failures": self.failures,
            "diagnostics": self.diagnostics,
            "drift": self.drift,
            "solver": self.solver,
            "sublevel": [r.to_dict() for r in self.regions],
        }

    def to_json(self, path: str | os.PathLike | None = None) -> str:
        text = json.dumps(self.to_dict(), indent=1, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    def write_csv(self, path: str | os.PathLike) -> None:
        """One row per grid point: the swept coordinates then ``G`` (empty when failed)."""
        axes = self.space.axes
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.names + ["G"])
            for idx in np.ndindex(*self.values.shape):
                v = self.values[idx]
                w.writerow([f"{axes[n][i]:.12g}" for n, i in zip(self.names, idx)]
                           + ["" if np.isnan(v) else f"{v:.17g}"])


# -- evaluation -------------------------------------------------------------

_DIAG_KEYS = ("steps", "dt", "final_mass", "min_value", "max_mass_increase", "tail_change")


def _evaluate(args):
    point, drift, config, p_d, kinds, normalize = args
    try:
        model = solve(point, drift, config)
        diag = {k: model.meta[k] for k in _DIAG_KEYS}
        if normalize:
            model = model.normalized()
        return {k: distance.objective(k, model, p_d) for k in kinds}, diag, None
    except (ArithmeticError, ValueError) as exc:
        return None, None, f"{type(exc).__name__}: {exc}"


def _run(space: ParamSpace, drift: DriftModel, p_d: Density, config: SolverConfig,
         kinds: tuple[str, ...], normalize: bool, workers: int):
    check_same_grid(p_d, Density(config.grid, np.zeros(config.grid.m)))
    for k in kinds:
        if k not in distance.OBJECTIVES:
            raise ValueError(f"unknown objective {k!r}")
    points = space.points()
    jobs = [(pt, drift, config, p_d, kinds, normalize) for pt in points]
    if workers <= 1:
        outcomes = [_evaluate(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * workers))))

    values = {k: np.full(len(points), np.nan) for k in kinds}
    failures = []
    diagnostics = [diag for _, diag, _ in outcomes]
    for i, (res, _, err) in enumerate(outcomes):
        if err is not None:
            idx = np.unravel_index(i, space.shape) if space.shape else ()
            failures.append({"index": [int(j) for j in idx], "point": points[i].to_dict(), "error": err})
            continue
        for k in kinds:
            values[k][i] = res[k]
    return {k: v.reshape(space.shape) for k, v in values.items()}, failures, diagnostics


def sweep(space: ParamSpace, drift: DriftModel, objective: str, p_d: Density,
          config: SolverConfig, workers: int = 1, normalize: bool = True,
          selection: str | None = None) -> SweepResult:
    """Evaluate ``objective`` at every point of ``space``.

    The model density is renormalised to unit mass before comparison unless
    ``normalize=False``; the absorbing solution loses mass through the
    boundary while the observed path never does.  Points whose solve fails
    are kept as NaN and listed in ``failures``.
    """
    values, failures, diagnostics = _run(space, drift, p_d, config, (objective,), normalize, workers)
    return SweepResult(
        objective=objective,
        space=space,
        values=values[objective],
        failures=failures,
        drift=drift.to_dict(),
        solver=config.to_dict(),
        normalize=normalize,
        selection=selection or distance.SELECT[objective],
        diagnostics=diagnostics,
    )


def compare_objectives(space: ParamSpace, drift: DriftModel, p_d: Density,
                       config: SolverConfig, workers: int = 1,
                       normalize: bool = True) -> tuple[list[dict], dict[str, SweepResult]]:
    """Run one sweep scoring every objective from the same solves.

    Returns table rows (objective, selection rule, estimate, value; the
    sup-norm row also carries its argmin estimate) and the per-objective
    :class:`SweepResult` objects.
    """
    values, failures, diagnostics = _run(space, drift, p_d, config, distance.OBJECTIVES, normalize, workers)
    results = {}
    rows = []
    for kind in distance.OBJECTIVES:
        r = SweepResult(kind, space, values[kind], list(failures), drift.to_dict(),
                        config.to_dict(), normalize, distance.SELECT[kind], diagnostics=diagnostics)
        results[kind] = r
        point, value = r.best()
        row = {"objective": kind, "selection": r.selection, **point.to_dict(), "G": value}
        if r.selection == "argmax":
            alt, alt_value = r.best("argmin")
            row["argmin_point"] = alt.to_dict()
            row["argmin_G"] = alt_value
        rows.append(row)
    return rows, results


def write_comparison_csv(rows: list[dict], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["objective", "selection", "theta", "alpha", "epsilon", "G"])
        for r in rows:
            w.writerow([r["objective"], r["selection"], f"{r['theta']:.12g}",
                        f"{r['alpha']:.12g}", f"{r['epsilon']:.12g}", f"{r['G']:.17g}"])


def sublevel_region(result: SweepResult, threshold: float) -> Region:
    """Grid points of ``result`` with objective at or below ``threshold``."""
    return result.sublevel_region(threshold)
