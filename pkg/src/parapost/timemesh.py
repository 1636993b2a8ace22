"""Time meshes: uniform, the alternating pair-doubling mesh, and validation."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .greens import Interval

__all__ = ["TimeMesh", "uniform", "pair_doubling", "from_points"]


@dataclass(frozen=True, eq=False)
class TimeMesh:
    """Strictly increasing time points 0 = t_0 < ... < t_M = T."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a time mesh needs at least the two points 0 and T")
        if pts[0] != 0.0:
            raise ValueError(f"time mesh must start at 0, got {pts[0]}")
        if not np.all(np.diff(pts) > 0.0):
            raise ValueError("time mesh points must be strictly increasing")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def num_steps(self) -> int:
        return self.points.size - 1

    @property
    def horizon(self) -> float:
        return float(self.points[-1])

    @cached_property
    def steps(self) -> np.ndarray:
        tau = np.diff(self.points)
        tau.setflags(write=False)
        return tau

    def interval(self, j: int) -> Interval:
        """The j-th interval (t_{j-1}, t_j), 1-based, inside [0, T]."""
        if not 1 <= j <= self.num_steps:
            raise IndexError(f"interval index {j} outside 1..{self.num_steps}")
        return Interval(float(self.points[j - 1]), float(self.points[j]), self.horizon)


def uniform(M: int, T: float) -> TimeMesh:
    """Uniform mesh with M steps of size T / M."""
    if M < 1:
        raise ValueError("M must be a positive integer")
    if not T > 0.0:
        raise ValueError("T must be positive")
    return TimeMesh(np.linspace(0.0, T, M + 1))


def pair_doubling(M: int, T: float) -> TimeMesh:
    """Mesh with steps alternating (h, 2h, h, 2h, ...), tau_j = 2 tau_{j-1}
    for even j.  The step h = 2T / (3M) is forced by the steps summing to T.
    """
    if M < 2 or M % 2 != 0:
        raise ValueError("pair doubling needs an even positive M")
    if not T > 0.0:
        raise ValueError("T must be positive")
    h = 2.0 * T / (3.0 * M)
    steps = np.tile([h, 2.0 * h], M // 2)
    points = np.concatenate(([0.0], np.cumsum(steps)))
    if abs(points[-1] - T) > 1e-12 * T:
        raise AssertionError("pair-doubling construction failed to reach T")
    points[-1] = T
    return TimeMesh(points)


def from_points(points) -> TimeMesh:
    """Validate an explicit list of time points as a mesh."""
    return TimeMesh(np.asarray(points, dtype=float))
