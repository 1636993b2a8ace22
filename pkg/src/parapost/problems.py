"""Problem definitions: coefficients, data, horizon and kernel constants."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .greens import GreenFunctionBounds

__all__ = ["ParabolicProblem", "test_problem"]


@dataclass(frozen=True)
class ParabolicProblem:
    """A 1-D linear parabolic problem on (-1, 1) x (0, T].

    du/dt - u_xx + reaction(x) u = forcing(x, t), homogeneous Dirichlet
    boundary data, u(x, 0) = initial(x).  ``green`` carries the kernel
    envelope constants the error bounds are built from; they are inputs,
    not derived from the operator.
    """

    reaction: Callable[[np.ndarray], np.ndarray]
    forcing: Callable[[np.ndarray, float], np.ndarray]
    initial: Callable[[np.ndarray], np.ndarray]
    horizon: float
    green: GreenFunctionBounds

    def __post_init__(self) -> None:
        if not self.horizon > 0.0:
            raise ValueError("horizon must be positive")
        ends = np.asarray(self.initial(np.array([-1.0, 1.0])), dtype=float)
        if np.abs(ends).max() > 1e-12:
            raise ValueError("initial data must vanish at x = -1 and x = 1")


def test_problem() -> ParabolicProblem:
    """The reaction-diffusion benchmark used throughout the test suite.

    du/dt - u_xx + (5x + 6) u = exp(-4t) + cos(pi (x + t)^3) on
    (-1, 1) x (0, 1], u0(x) = sin(pi (1 + x) / 2).  The kernel constants
    are kappa_0 = 1, kappa_p = (3 / 2^(3/2)) p! 18^(p-1), gamma = 1/2.
    """
    kappa1 = 3.0 / 2.0**1.5
    return ParabolicProblem(
        reaction=lambda x: 5.0 * x + 6.0,
        forcing=lambda x, t: np.exp(-4.0 * t) + np.cos(np.pi * (x + t) ** 3),
        initial=lambda x: np.sin(0.5 * np.pi * (1.0 + x)),
        horizon=1.0,
        green=GreenFunctionBounds(
            kappa0=1.0,
            kappa1=kappa1,
            kappa2=36.0 * kappa1,
            gamma=0.5,
        ),
    )
