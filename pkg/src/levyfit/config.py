"""Run configuration: one YAML/JSON document with a section per pipeline stage.

Validation happens up front and reports dotted field paths
(``model.alpha``, ``estimation.alpha.count``) so a bad file fails before any
computation starts.
"""

from __future__ import annotations

import copy
import json

import yaml

from .estimator import ParamSpace
from .fpsolver import InitialCondition, SolverConfig
from .grid import Grid1D
from .model import DriftModel
from .distance import OBJECTIVES

DEFAULTS = {
    "model": {"drift": {"kind": "cubic"}, "theta": 1.0, "alpha": 1.7, "epsilon": 0.3},
    "simulation": {"n": 1_000_000, "dt": 0.01, "substeps": 10, "seed": 1, "x0": 0.0},
    "domain": {"a": -3.0, "b": 3.0, "spacing": 0.05},
    "solver": {
        "t_final": 50.0,
        "dt": None,
        "initial": {"kind": "gaussian", "center": 0.0, "precision": 40.0},
        "advection": "upwind",
        "method": "auto",
        "trace_every": 1000,
    },
    "kde": {"bandwidth": None, "method": "auto"},
    "estimation": {
        "theta": {"value": 1.0},
        "alpha": {"lo": 1.0, "hi": 1.95, "step": 0.035},
        "epsilon": {"value": 0.3},
        "objective": "hellinger",
        "normalize": True,
        "thresholds": [],
        "threshold_factors": [1.5],
    },
    "output": {"dir": "out"},
    "workers": 1,
}


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in ("theta", "alpha", "epsilon", "drift"):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load(path=None, overrides: dict | None = None) -> dict:
    """Read a config file (YAML or JSON), fill in defaults and apply overrides."""
    raw = {}
    if path is not None:
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "config must be a mapping")
    cfg = _merge(DEFAULTS, raw)
    for key, value in (overrides or {}).items():
        set_path(cfg, key, value)
    validate(cfg)
    return cfg


def set_path(cfg: dict, dotted: str, value) -> None:
    parts = dotted.split(".")
    node = cfg
    for p in parts[:-1]:
        if not isinstance(node.get(p), dict):
            node[p] = {}
        node = node[p]
    node[parts[-1]] = value


def parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ConfigError(text, "override must look like section.key=value")
    key, value = text.split("=", 1)
    return key.strip(), yaml.safe_load(value)


def _num(cfg, path, *, lo=None, hi=None, lo_open=False, hi_open=False, integer=False, allow_none=False):
    node = cfg
    for p in path.split("."):
        if not isinstance(node, dict) or p not in node:
            raise ConfigError(path, "missing")
        node = node[p]
    if node is None and allow_none:
        return None
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(path, f"expected a number, got {node!r}")
    if integer and int(node) != node:
        raise ConfigError(path, f"expected an integer, got {node!r}")
    if lo is not None and (node <= lo if lo_open else node < lo):
        raise ConfigError(path, f"must be {'>' if lo_open else '>='} {lo}, got {node}")
    if hi is not None and (node >= hi if hi_open else node > hi):
        raise ConfigError(path, f"must be {'<' if hi_open else '<='} {hi}, got {node}")
    return node


def validate(cfg: dict) -> None:
    _num(cfg, "model.alpha", lo=0, hi=2, lo_open=True, hi_open=True)
    _num(cfg, "model.epsilon", lo=0)
    _num(cfg, "model.theta")
    try:
        drift(cfg)
    except ValueError as exc:
        raise ConfigError("model.drift", str(exc)) from None
    _num(cfg, "simulation.n", lo=2, integer=True)
    _num(cfg, "simulation.dt", lo=0, lo_open=True)
    _num(cfg, "simulation.substeps", lo=1, integer=True)
    _num(cfg, "simulation.seed", lo=0, integer=True)
    _num(cfg, "simulation.x0")
    a = _num(cfg, "domain.a")
    b = _num(cfg, "domain.b")
    if not a < b:
        raise ConfigError("domain.b", f"must exceed domain.a ({a}), got {b}")
    _num(cfg, "domain.spacing", lo=0, lo_open=True)
    try:
        grid(cfg)
    except ValueError as exc:
        raise ConfigError("domain.spacing", str(exc)) from None
    _num(cfg, "solver.t_final", lo=0)
    _num(cfg, "solver.dt", lo=0, lo_open=True, allow_none=True)
    try:
        solver_config(cfg)
    except ValueError as exc:
        raise ConfigError("solver", str(exc)) from None
    _num(cfg, "kde.bandwidth", lo=0, lo_open=True, allow_none=True)
    if cfg["kde"].get("method") not in ("auto", "direct", "binned"):
        raise ConfigError("kde.method", "must be auto, direct or binned")
    est = cfg["estimation"]
    if est.get("objective") not in OBJECTIVES:
        raise ConfigError("estimation.objective", f"must be one of {OBJECTIVES}")
    for name in ("theta", "alpha", "epsilon"):
        coord = est.get(name)
        if isinstance(coord, dict) and "value" not in coord:
            if "count" in coord:
                _num(cfg, f"estimation.{name}.count", lo=2, integer=True)
            elif "step" in coord:
                _num(cfg, f"estimation.{name}.step", lo=0, lo_open=True)
            else:
                raise ConfigError(f"estimation.{name}", "a range needs 'step' or 'count'")
    try:
        param_space(cfg)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError("estimation", str(exc)) from None
    for i, t in enumerate(est.get("thresholds", [])):
        if not isinstance(t, (int, float)) or t <= 0:
            raise ConfigError(f"estimation.thresholds[{i}]", "must be a positive number")
    for i, t in enumerate(est.get("threshold_factors", [])):
        if not isinstance(t, (int, float)) or t < 1:
            raise ConfigError(f"estimation.threshold_factors[{i}]", "must be a number >= 1")
    _num(cfg, "workers", lo=1, integer=True)


def drift(cfg: dict) -> DriftModel:
    return DriftModel.from_dict(cfg["model"]["drift"])


def grid(cfg: dict) -> Grid1D:
    d = cfg["domain"]
    return Grid1D.from_spacing(float(d["a"]), float(d["b"]), float(d["spacing"]))


def solver_config(cfg: dict) -> SolverConfig:
    s = cfg["solver"]
    init = s.get("initial", {})
    return SolverConfig(
        grid=grid(cfg),
        t_final=float(s["t_final"]),
        dt=None if s.get("dt") is None else float(s["dt"]),
        initial=InitialCondition(init.get("kind", "gaussian"), float(init.get("center", 0.0)),
                                 float(init.get("precision", 40.0))),
        advection=s.get("advection", "upwind"),
        method=s.get("method", "auto"),
        trace_every=int(s.get("trace_every", 0)),
    )


def param_space(cfg: dict) -> ParamSpace:
    est = cfg["estimation"]
    return ParamSpace.from_dict({n: est[n] for n in ("theta", "alpha", "epsilon")})


def dump(cfg: dict) -> str:
    return json.dumps(cfg, indent=2, sort_keys=True)
