"""
Hellinger against relative L2 and sup-norm objectives
=====================================================

All three distances are computed from the same solves.  The sup-norm row
is selected by its maximum; its minimiser is reported alongside.
"""

from levyfit import DriftModel, Fixed, Grid1D, ParamSpace, Range, SolverConfig
from levyfit import compare_objectives, estimate_density, simulate

drift = DriftModel("cubic")
traj = simulate(drift, 1.0, 1.7, 0.3, x0=0.0, dt=0.01, n=1_000_000, seed=1, substeps=10)
p_d = estimate_density(traj, Grid1D.from_spacing(-3.0, 3.0, 0.05))

space = ParamSpace(Fixed(1.0), Range(1.0, 1.95, step=0.035), Fixed(0.3))
rows, _ = compare_objectives(space, drift, p_d, SolverConfig(p_d.grid, t_final=50.0), workers=4)

print(f"{'objective':>13}  {'rule':>6}  {'alpha':>6}  G")
for r in rows:
    line = f"{r['objective']:>13}  {r['selection']:>6}  {r['alpha']:6.3f}  {r['G']:.6g}"
    if "argmin_point" in r:
        line += f"   (argmin: alpha={r['argmin_point']['alpha']:.3f})"
    print(line)
