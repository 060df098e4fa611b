"""Orbit diagnostics and bifurcation sweeps."""

from edudyn.model.core import FiniteDifference, finite_difference

from .bifurcation import BifurcationDiagram, SweepCell, SweepSpec, bifurcation_sweep, first_transition, sweep_workers
from .lyapunov import LyapunovEstimate, lyapunov_1d, lyapunov_2d
from .orbits import AttractorBounds, CobwebPath, attractor_bounds, cobweb, period_detect

__all__ = [
    "AttractorBounds",
    "BifurcationDiagram",
    "CobwebPath",
    "FiniteDifference",
    "LyapunovEstimate",
    "SweepCell",
    "SweepSpec",
    "attractor_bounds",
    "bifurcation_sweep",
    "cobweb",
    "finite_difference",
    "first_transition",
    "lyapunov_1d",
    "lyapunov_2d",
    "period_detect",
    "sweep_workers",
]
