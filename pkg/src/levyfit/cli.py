"""Command-line pipeline: simulate -> density -> solve / estimate / compare.

Every command writes its data files plus a ``*_meta.json`` with versions,
seeds, timings and diagnostics, and an ``effective_config.json`` holding the
fully resolved configuration (re-running with it reproduces the outputs).

Exit codes: 0 success, 2 validation error, 3 numeric failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__, config as cfgmod
from .estimator import compare_objectives, sweep, write_comparison_csv
from .fpsolver import solve
from .grid import read_density_csv, write_density_csv
from .kde import estimate_density
from .model import ParamPoint
from .sde import export_csv, load_trajectory, save_trajectory, simulate

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _versions() -> dict:
    return {"levyfit": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _write_meta(out: Path, name: str, cfg: dict, **extra) -> None:
    meta = {"command": name, "versions": _versions(), "seed": cfg["simulation"]["seed"], **extra}
    (out / f"{name}_meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=float) + "\n")
    (out / "effective_config.json").write_text(cfgmod.dump(cfg) + "\n")


def cmd_simulate(cfg: dict, out: Path, args) -> int:
    m, s = cfg["model"], cfg["simulation"]
    t0 = time.perf_counter()
    traj = simulate(cfgmod.drift(cfg), m["theta"], m["alpha"], m["epsilon"], s["x0"],
                    s["dt"], s["n"], seed=s["seed"], substeps=s["substeps"])
    elapsed = time.perf_counter() - t0
    save_trajectory(traj, out / "trajectory.bin")
    if args.csv:
        export_csv(traj, out / "trajectory.csv")
    summary = traj.summary(cfg["domain"]["a"], cfg["domain"]["b"])
    with open(out / "trajectory_summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["key", "value"])
        for k, v in summary.items():
            w.writerow([k, repr(v) if isinstance(v, float) else v])
    _write_meta(out, "simulate", cfg, elapsed_s=elapsed, summary=summary)
    print(f"wrote {summary['n']} observations to {out / 'trajectory.bin'} (s = {summary['s']:.6g})")
    return EXIT_OK


def cmd_density(cfg: dict, out: Path, args) -> int:
    path = Path(args.trajectory) if args.trajectory else out / "trajectory.bin"
    traj = load_trajectory(path)
    t0 = time.perf_counter()
    d = estimate_density(traj, cfgmod.grid(cfg), cfg["kde"]["bandwidth"], cfg["kde"]["method"])
    write_density_csv(d, out / "density.csv")
    _write_meta(out, "density", cfg, trajectory=str(path), elapsed_s=time.perf_counter() - t0,
                mass=d.mass(), **d.meta)
    print(f"density on {d.grid.m} nodes, bandwidth {d.meta['bandwidth']:.6g} ({d.meta['bandwidth_source']})")
    return EXIT_OK


def cmd_solve(cfg: dict, out: Path, args) -> int:
    m = cfg["model"]
    point = ParamPoint(
        args.theta if args.theta is not None else m["theta"],
        args.alpha if args.alpha is not None else m["alpha"],
        args.epsilon if args.epsilon is not None else m["epsilon"],
    )
    d = solve(point, cfgmod.drift(cfg), cfgmod.solver_config(cfg))
    write_density_csv(d, out / "solution.csv")
    trace = {k: d.meta[k] for k in ("steps", "dt", "initial_mass", "final_mass", "min_value",
                                     "max_mass_increase", "tail_change", "mass_history") if k in d.meta}
    (out / "solver_trace.json").write_text(json.dumps(trace, indent=1) + "\n")
    _write_meta(out, "solve", cfg, point=point.to_dict(), elapsed_s=d.meta["elapsed_s"],
                final_mass=d.meta["final_mass"])
    print(f"solved {point} to t={cfg['solver']['t_final']}: {d.meta['steps']} steps, "
          f"final mass {d.meta['final_mass']:.6g}")
    return EXIT_OK


def _thresholds(cfg, result) -> list[float]:
    est = cfg["estimation"]
    lowest = float(np.nanmin(result.values))
    return sorted(set([float(t) for t in est.get("thresholds", []) if t >= lowest]
                      + [f * lowest for f in est.get("threshold_factors", [])]))


def _density_arg(args, out: Path):
    path = Path(args.density) if args.density else out / "density.csv"
    return read_density_csv(path)


def _check_grid(cfg, p_d):
    g = cfgmod.grid(cfg)
    if not p_d.grid.same_as(g, rtol=1e-9):
        raise cfgmod.ConfigError("domain", f"density grid {p_d.grid} does not match configured grid {g}")
    return g


def cmd_estimate(cfg: dict, out: Path, args) -> int:
    if args.compare:
        return cmd_compare(cfg, out, args)
    p_d = _density_arg(args, out)
    _check_grid(cfg, p_d)
    est = cfg["estimation"]
    t0 = time.perf_counter()
    result = sweep(cfgmod.param_space(cfg), cfgmod.drift(cfg), est["objective"], p_d,
                   cfgmod.solver_config(cfg), workers=cfg["workers"], normalize=est["normalize"])
    elapsed = time.perf_counter() - t0
    regions = [result.sublevel_region(t) for t in _thresholds(cfg, result)]
    result.to_json(out / "sweep.json")
    result.write_csv(out / "sweep.csv")
    _write_meta(out, "estimate", cfg, elapsed_s=elapsed, workers=cfg["workers"],
                n_points=int(result.values.size), n_failures=len(result.failures))
    point, value = result.best()
    print(f"objective {result.objective} ({result.selection}) over {', '.join(result.names)}:")
    print("  estimate  " + "  ".join(f"{n}={getattr(point, n):.6g}" for n in result.names)
          + f"  G={value:.6g}")
    for r in regions:
        print(f"  G <= {r.threshold:.6g}: "
              + "  ".join(f"{n} in [{lo:.6g}, {hi:.6g}]" for n, (lo, hi) in r.box.items())
              + f"  ({len(r.points)} points)")
    if result.failures:
        print(f"  {len(result.failures)} grid points failed (see sweep.json)")
    return EXIT_OK


def cmd_compare(cfg: dict, out: Path, args) -> int:
    p_d = _density_arg(args, out)
    _check_grid(cfg, p_d)
    t0 = time.perf_counter()
    rows, results = compare_objectives(cfgmod.param_space(cfg), cfgmod.drift(cfg), p_d,
                                       cfgmod.solver_config(cfg), workers=cfg["workers"],
                                       normalize=cfg["estimation"]["normalize"])
    write_comparison_csv(rows, out / "comparison.csv")
    for kind, r in results.items():
        r.to_json(out / f"sweep_{kind}.json")
    _write_meta(out, "compare", cfg, elapsed_s=time.perf_counter() - t0, rows=rows)
    names = next(iter(results.values())).names
    for row in rows:
        print(f"{row['objective']:>13} ({row['selection']}): "
              + "  ".join(f"{n}={row[n]:.6g}" for n in names) + f"  G={row['G']:.6g}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "density": cmd_density, "solve": cmd_solve,
            "estimate": cmd_estimate, "compare": cmd_compare}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML or JSON run configuration")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--workers", type=int, help="worker processes for sweeps")
    common.add_argument("--seed", type=int, help="simulation seed")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config entry, e.g. --set model.alpha=1.5")

    parser = argparse.ArgumentParser(prog="levyfit", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", parents=[common], help="simulate a trajectory")
    p.add_argument("--csv", action="store_true", help="also write trajectory.csv")
    p = sub.add_parser("density", parents=[common], help="kernel density of a trajectory")
    p.add_argument("--trajectory", help="trajectory file (default: <out>/trajectory.bin)")
    p = sub.add_parser("solve", parents=[common], help="solve the Fokker-Planck equation once")
    p.add_argument("--theta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--epsilon", type=float)
    for name in ("estimate", "compare"):
        p = sub.add_parser(name, parents=[common], help=f"{name} over the parameter grid")
        p.add_argument("--density", help="density CSV (default: <out>/density.csv)")
        if name == "estimate":
            p.add_argument("--compare", action="store_true", help="score all three objectives")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = dict(cfgmod.parse_override(s) for s in args.set)
        if args.out:
            overrides["output.dir"] = args.out
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.seed is not None:
            overrides["simulation.seed"] = args.seed
        cfg = cfgmod.load(args.config, overrides)
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # yaml parse errors and the like
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    out = Path(cfg["output"]["dir"])
    try:
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out, args)
    except ArithmeticError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
