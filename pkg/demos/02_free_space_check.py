"""
The solver without drift on a wide box reproduces the stable law
================================================================

Starting from a point mass, the density of ``eps L_t`` is stable with
characteristic function ``exp(-t eps^alpha |k|^alpha)``.  On (-20, 20) the
absorbing walls barely matter by t = 0.5, so the solution can be checked
against scipy's stable density.
"""

import numpy as np
from scipy import stats

from levyfit import DriftModel, Grid1D, InitialCondition, ParamPoint, SolverConfig, solve

no_drift = DriftModel("polynomial", base=(0.0,), theta_coeffs=(0.0,))
grid = Grid1D.from_spacing(-20.0, 20.0, 0.02)
cfg = SolverConfig(grid, t_final=0.5, initial=InitialCondition("delta", 0.0))

for alpha in (0.8, 1.5, 1.9):
    d = solve(ParamPoint(1.0, alpha, 1.0), no_drift, cfg)
    ref = stats.levy_stable(alpha, 0.0, scale=0.5 ** (1 / alpha)).pdf(grid.nodes)
    l1 = grid.trapezoid(np.abs(d.values - ref))
    print(f"alpha={alpha}: {d.meta['steps']} steps, L1 error {l1:.2e}, mass left {d.meta['final_mass']:.4f}")
