"""Estimate alpha-stable SDE parameters by Hellinger-distance fitting of Fokker-Planck densities."""

__version__ = "0.1.0"

from .distance import absolute_sup, hellinger, hellinger_sq, relative_l2
from .estimator import Fixed, ParamSpace, Range, SweepResult, compare_objectives, sweep
from .fpsolver import InitialCondition, SolverConfig, assemble, solve, step
from .grid import Density, Grid1D
from .kde import bandwidth, estimate_density
from .model import DriftModel, ParamPoint
from .sde import Trajectory, load_trajectory, save_trajectory, simulate
from .stable import c_alpha, sample_standard

__all__ = [
    "Density", "DriftModel", "Fixed", "Grid1D", "InitialCondition", "ParamPoint", "ParamSpace",
    "Range", "SolverConfig", "SweepResult", "Trajectory", "absolute_sup", "assemble", "bandwidth",
    "c_alpha", "compare_objectives", "estimate_density", "hellinger", "hellinger_sq",
    "load_trajectory", "relative_l2", "sample_standard", "save_trajectory", "simulate", "solve",
    "step", "sweep",
]
