"""Chebyshev spectral collocation on [-1, 1] with homogeneous Dirichlet data.

A :class:`SpatialGrid` holds the Chebyshev-Gauss-Lobatto nodes (ascending)
and the collocation differentiation matrices.  An :class:`EllipticOperator`
represents L = -d^2/dx^2 + c(x) restricted to the Dirichlet space; shifted
systems (I + alpha L) u = r and pure elliptic systems L u = r are solved by
dense LU with partial pivoting, with factorisations cached per shift.

A ``Field`` is simply a float ndarray of nodal values, boundary nodes
included.  Maximum norms are taken over the polynomial interpolant,
evaluated by barycentric interpolation with the closed-form Lobatto weights
on a set of equispaced sample points plus the nodes themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import lu_factor, lu_solve

__all__ = [
    "Field",
    "SpatialGrid",
    "EllipticOperator",
    "build_grid",
    "build_operator",
    "apply",
    "solve_shifted",
    "solve_elliptic",
    "max_norm",
    "evaluate",
]

Field = np.ndarray

DEFAULT_DEGREE = 31
DEFAULT_SAMPLING = 1001

# Boundary values this large mean the field left the Dirichlet space.
_BOUNDARY_TOL = 1e-12
# Factorisation caches are dropped beyond this many distinct shifts.
_CACHE_LIMIT = 200


def _barycentric_matrix(nodes: np.ndarray, weights: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Rows evaluate the interpolant through ``nodes`` at the points ``x``."""
    d = x[:, None] - nodes[None, :]
    exact = d == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        r = weights[None, :] / d
        P = r / r.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    if np.any(hit):
        P[hit] = exact[hit].astype(float)
    return P


@dataclass(eq=False)
class SpatialGrid:
    """Chebyshev-Gauss-Lobatto collocation grid of polynomial degree N."""

    degree: int
    nodes: np.ndarray
    diff1: np.ndarray
    diff2: np.ndarray
    _sampling_cache: dict = field(default_factory=dict, repr=False)

    @property
    def num_nodes(self) -> int:
        return self.degree + 1

    def barycentric_weights(self) -> np.ndarray:
        """Closed-form Lobatto weights: alternating signs, halved endpoints."""
        w = np.ones(self.num_nodes)
        w[1::2] = -1.0
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def sampling_operator(self, sampling: int) -> np.ndarray:
        """Cached interpolation matrix onto ``sampling`` equispaced points."""
        P = self._sampling_cache.get(sampling)
        if P is None:
            x = np.linspace(-1.0, 1.0, sampling)
            P = _barycentric_matrix(self.nodes, self.barycentric_weights(), x)
            self._sampling_cache[sampling] = P
        return P


def build_grid(N: int = DEFAULT_DEGREE) -> SpatialGrid:
    """Assemble nodes and differentiation matrices for degree N >= 2.

    The diagonal of the first-derivative matrix is the negative row sum of
    the off-diagonal entries, which cancels the rounding the direct formula
    would commit.  The second-derivative matrix is the square of the first.
    """
    if N < 2:
        raise ValueError("polynomial degree must be at least 2")
    k = np.arange(N + 1)
    x = np.cos(np.pi * k / N)  # descending
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** k
    dX = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    # reorder ascending on [-1, 1]
    rev = slice(None, None, -1)
    nodes = x[rev].copy()
    diff1 = D[rev, rev].copy()
    diff2 = diff1 @ diff1
    return SpatialGrid(degree=N, nodes=nodes, diff1=diff1, diff2=diff2)


@dataclass(eq=False)
class EllipticOperator:
    """L = -d^2/dx^2 + c(x) on the grid, Dirichlet rows/columns eliminated.

    ``full_matrix`` collocates L at every node (its boundary rows give the
    value of L applied to the interpolant at x = +-1); ``interior_matrix``
    is the Dirichlet block actually inverted.
    """

    grid: SpatialGrid
    coefficient: np.ndarray
    full_matrix: np.ndarray
    interior_matrix: np.ndarray
    _shift_cache: dict = field(default_factory=dict, repr=False)
    _elliptic_lu: tuple | None = field(default=None, repr=False)

    def apply(self, u: Field) -> Field:
        """L u at interior nodes; boundary entries of the output are zero.

        ``u`` must lie in the Dirichlet space (boundary values below 1e-12).
        """
        if max(abs(u[0]), abs(u[-1])) > _BOUNDARY_TOL:
            raise ValueError("field has non-zero boundary values")
        out = np.zeros_like(u)
        out[1:-1] = self.interior_matrix @ u[1:-1]
        return out

    def apply_full(self, u: Field) -> Field:
        """L applied to the interpolant of ``u`` at all nodes, boundary included."""
        return self.full_matrix @ u

    def solve_shifted(self, alpha: float, rhs: Field) -> Field:
        """Solve (I + alpha L) u = rhs at interior nodes, zero boundary."""
        if alpha < 0.0:
            raise ValueError("alpha must be non-negative")
        out = np.zeros_like(rhs)
        if alpha == 0.0:
            out[1:-1] = rhs[1:-1]
            return out
        factor = self._shift_cache.get(alpha)
        if factor is None:
            n = self.interior_matrix.shape[0]
            factor = lu_factor(np.eye(n) + alpha * self.interior_matrix, check_finite=False)
            if len(self._shift_cache) < _CACHE_LIMIT:
                self._shift_cache[alpha] = factor
        out[1:-1] = lu_solve(factor, rhs[1:-1], check_finite=False)
        return out

    def solve_elliptic(self, rhs: Field) -> Field:
        """Solve L u = rhs at interior nodes, zero boundary."""
        if self._elliptic_lu is None:
            self._elliptic_lu = lu_factor(self.interior_matrix, check_finite=False)
        out = np.zeros_like(rhs)
        out[1:-1] = lu_solve(self._elliptic_lu, rhs[1:-1], check_finite=False)
        return out


def build_operator(grid: SpatialGrid, c: Callable[[np.ndarray], np.ndarray]) -> EllipticOperator:
    """Collocate L = -d^2/dx^2 + c(x) on the grid."""
    cvals = np.broadcast_to(np.asarray(c(grid.nodes), dtype=float), grid.nodes.shape)
    full = -grid.diff2 + np.diag(cvals)
    return EllipticOperator(
        grid=grid,
        coefficient=cvals.copy(),
        full_matrix=full,
        interior_matrix=full[1:-1, 1:-1].copy(),
    )


def apply(L: EllipticOperator, u: Field) -> Field:
    return L.apply(u)


def solve_shifted(alpha: float, L: EllipticOperator, rhs: Field) -> Field:
    return L.solve_shifted(alpha, rhs)


def solve_elliptic(L: EllipticOperator, rhs: Field) -> Field:
    return L.solve_elliptic(rhs)


def max_norm(u: Field, grid: SpatialGrid, sampling: int = DEFAULT_SAMPLING) -> float:
    """Maximum of the interpolant of ``u`` over equispaced samples and nodes."""
    if sampling < 2:
        raise ValueError("sampling must be at least 2")
    P = grid.sampling_operator(sampling)
    return float(max(np.abs(P @ u).max(), np.abs(u).max()))


def evaluate(u: Field, grid: SpatialGrid, x) -> np.ndarray:
    """Barycentric evaluation of the interpolant of ``u`` at arbitrary points."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    P = _barycentric_matrix(grid.nodes, grid.barycentric_weights(), x)
    return P @ u
