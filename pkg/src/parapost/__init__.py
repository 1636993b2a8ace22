"""Guaranteed maximum-norm a posteriori error bounds for parabolic time stepping.

The package time-semidiscretises 1-D linear parabolic problems on (-1, 1)
with five schemes (implicit Euler, Crank-Nicolson, extrapolated Euler,
dG(1), BDF-2), computes an order-5 collocation reference, and evaluates
computable upper bounds on the final-time maximum-norm error together with
their per-step component breakdowns.
"""

from .greens import GreenFunctionBounds, Interval
from .problems import ParabolicProblem, test_problem
from .spatial import EllipticOperator, SpatialGrid, build_grid, build_operator, max_norm
from .timemesh import TimeMesh, from_points, pair_doubling, uniform
from .steppers import (
    StepRecord,
    Trajectory,
    final_error,
    run_backward_euler,
    run_bdf2,
    run_crank_nicolson,
    run_dg1,
    run_extrapolated_euler,
    run_reference,
)
from .estimators import (
    EstimatorReport,
    QuadRule,
    StepEstimate,
    asymptotic_euler_bounds,
    component_trace,
    data_oscillation,
    estimate_backward_euler,
    estimate_bdf2,
    estimate_crank_nicolson,
    estimate_dg1,
    estimate_extrapolated,
)

__version__ = "0.1.0"

__all__ = [
    "GreenFunctionBounds",
    "Interval",
    "ParabolicProblem",
    "test_problem",
    "EllipticOperator",
    "SpatialGrid",
    "build_grid",
    "build_operator",
    "max_norm",
    "TimeMesh",
    "from_points",
    "pair_doubling",
    "uniform",
    "StepRecord",
    "Trajectory",
    "final_error",
    "run_backward_euler",
    "run_bdf2",
    "run_crank_nicolson",
    "run_dg1",
    "run_extrapolated_euler",
    "run_reference",
    "EstimatorReport",
    "QuadRule",
    "StepEstimate",
    "asymptotic_euler_bounds",
    "component_trace",
    "data_oscillation",
    "estimate_backward_euler",
    "estimate_bdf2",
    "estimate_crank_nicolson",
    "estimate_dg1",
    "estimate_extrapolated",
]
