"""Time-stepping runners for the five schemes and the order-5 reference.

Each runner walks the mesh once and records, per step, the data the
estimators consume: the accepted values U^{j-1}, U^j, method-specific stage
values, and samples of the forcing at the fractions of the step the
oscillation quadratures need.  Forcing samples are keyed by the backward
offset: key ``q`` holds f at t_j - q * tau_j, so 1.0 is the left endpoint,
0.0 the right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .problems import ParabolicProblem
from .spatial import EllipticOperator, Field, SpatialGrid, build_operator, max_norm
from .timemesh import TimeMesh

__all__ = [
    "StepRecord",
    "Trajectory",
    "run_backward_euler",
    "run_crank_nicolson",
    "run_extrapolated_euler",
    "run_dg1",
    "run_bdf2",
    "run_reference",
    "final_error",
]

TWO_THIRDS = 2.0 / 3.0

# 3-stage Radau IIA collocation (stiffly accurate, classical order 5).
_S6 = math.sqrt(6.0)
RADAU_C = np.array([(4.0 - _S6) / 10.0, (4.0 + _S6) / 10.0, 1.0])
RADAU_A = np.array(
    [
        [(88.0 - 7.0 * _S6) / 360.0, (296.0 - 169.0 * _S6) / 1800.0, (-2.0 + 3.0 * _S6) / 225.0],
        [(296.0 + 169.0 * _S6) / 1800.0, (88.0 + 7.0 * _S6) / 360.0, (-2.0 - 3.0 * _S6) / 225.0],
        [(16.0 - _S6) / 36.0, (16.0 + _S6) / 36.0, 1.0 / 9.0],
    ]
)


@dataclass
class StepRecord:
    """Everything recorded about one time step."""

    index: int
    t_prev: float
    t_cur: float
    u_prev: Field
    u_cur: Field
    stages: dict = field(default_factory=dict)
    f_samples: dict = field(default_factory=dict)

    @property
    def tau(self) -> float:
        return self.t_cur - self.t_prev

    def f(self, offset: float) -> Field:
        """Forcing sample at t_cur - offset * tau; raises if not recorded."""
        try:
            return self.f_samples[offset]
        except KeyError:
            raise ValueError(
                f"step {self.index} carries no forcing sample at offset {offset}"
            ) from None


@dataclass
class Trajectory:
    """A full run of one scheme on one mesh."""

    method: str
    problem: ParabolicProblem
    mesh: TimeMesh
    grid: SpatialGrid
    operator: EllipticOperator
    records: list

    @property
    def final(self) -> Field:
        return self.records[-1].u_cur

    @property
    def initial(self) -> Field:
        return self.records[0].u_prev


def _initial_field(problem: ParabolicProblem, grid: SpatialGrid) -> Field:
    u0 = np.asarray(problem.initial(grid.nodes), dtype=float).copy()
    u0[0] = u0[-1] = 0.0
    return u0


def _forcing(problem: ParabolicProblem, grid: SpatialGrid, t: float) -> Field:
    return np.asarray(problem.forcing(grid.nodes, t), dtype=float)


def _operator(problem, grid, operator):
    return operator if operator is not None else build_operator(grid, problem.reaction)


def run_backward_euler(
    problem: ParabolicProblem,
    mesh: TimeMesh,
    grid: SpatialGrid,
    operator: Optional[EllipticOperator] = None,
) -> Trajectory:
    """Implicit Euler: (I + tau_j L) U^j = U^{j-1} + tau_j f^j."""
    op = _operator(problem, grid, operator)
    pts = mesh.points
    u = _initial_field(problem, grid)
    f_prev = _forcing(problem, grid, 0.0)
    records = []
    for j in range(1, mesh.num_steps + 1):
        t_prev, t_cur = float(pts[j - 1]), float(pts[j])
        tau = t_cur - t_prev
        f_mid = _forcing(problem, grid, t_cur - 0.5 * tau)
        f_cur = _forcing(problem, grid, t_cur)
        u_new = op.solve_shifted(tau, u + tau * f_cur)
        records.append(
            StepRecord(
                j, t_prev, t_cur, u, u_new,
                f_samples={1.0: f_prev, 0.5: f_mid, 0.0: f_cur},
            )
        )
        u, f_prev = u_new, f_cur
    return Trajectory("euler", problem, mesh, grid, op, records)


def run_crank_nicolson(
    problem: ParabolicProblem,
    mesh: TimeMesh,
    grid: SpatialGrid,
    operator: Optional[EllipticOperator] = None,
) -> Trajectory:
    """Crank-Nicolson with quarter-point forcing samples recorded.

    (I + (tau_j/2) L) U^j = (I - (tau_j/2) L) U^{j-1} + (tau_j/2)(f^j + f^{j-1}).
    """
    op = _operator(problem, grid, operator)
    pts = mesh.points
    u = _initial_field(problem, grid)
    f_prev = _forcing(problem, grid, 0.0)
    records = []
    for j in range(1, mesh.num_steps + 1):
        t_prev, t_cur = float(pts[j - 1]), float(pts[j])
        tau = t_cur - t_prev
        samples = {
            1.0: f_prev,
            0.75: _forcing(problem, grid, t_cur - 0.75 * tau),
            0.5: _forcing(problem, grid, t_cur - 0.5 * tau),
            0.25: _forcing(problem, grid, t_cur - 0.25 * tau),
            0.0: _forcing(problem, grid, t_cur),
        }
        rhs = u - 0.5 * tau * op.apply(u) + 0.5 * tau * (samples[0.0] + f_prev)
        u_new = op.solve_shifted(0.5 * tau, rhs)
        records.append(StepRecord(j, t_prev, t_cur, u, u_new, f_samples=samples))
        u, f_prev = u_new, samples[0.0]
    return Trajectory("cn", problem, mesh, grid, op, records)


def run_extrapolated_euler(
    problem: ParabolicProblem,
    mesh: TimeMesh,
    grid: SpatialGrid,
    operator: Optional[EllipticOperator] = None,
):
    """One-step Euler V, two-half-step Euler W, extrapolation U = 2W - V.

    Returns the three trajectories (V, W, U).  The W records keep the
    half-step value W^{j-1/2} under stage key ``"w_half"``; the forcing
    samples live on the U records.
    """
    op = _operator(problem, grid, operator)
    pts = mesh.points
    u0 = _initial_field(problem, grid)
    v, w = u0, u0
    u = 2.0 * w - v
    f_prev = _forcing(problem, grid, 0.0)
    rec_v, rec_w, rec_u = [], [], []
    for j in range(1, mesh.num_steps + 1):
        t_prev, t_cur = float(pts[j - 1]), float(pts[j])
        tau = t_cur - t_prev
        half = 0.5 * tau
        f_mid = _forcing(problem, grid, t_cur - half)
        f_cur = _forcing(problem, grid, t_cur)
        v_new = op.solve_shifted(tau, v + tau * f_cur)
        w_half = op.solve_shifted(half, w + half * f_mid)
        w_new = op.solve_shifted(half, w_half + half * f_cur)
        u_new = 2.0 * w_new - v_new
        rec_v.append(StepRecord(j, t_prev, t_cur, v, v_new))
        rec_w.append(StepRecord(j, t_prev, t_cur, w, w_new, stages={"w_half": w_half}))
        rec_u.append(
            StepRecord(
                j, t_prev, t_cur, u, u_new,
                f_samples={1.0: f_prev, 0.5: f_mid, 0.0: f_cur},
            )
        )
        v, w, u, f_prev = v_new, w_new, u_new, f_cur
    traj_v = Trajectory("extrap-V", problem, mesh, grid, op, rec_v)
    traj_w = Trajectory("extrap-W", problem, mesh, grid, op, rec_w)
    traj_u = Trajectory("extrap", problem, mesh, grid, op, rec_u)
    return traj_v, traj_w, traj_u


def run_dg1(
    problem: ParabolicProblem,
    mesh: TimeMesh,
    grid: SpatialGrid,
    operator: Optional[EllipticOperator] = None,
) -> Trajectory:
    """Two-stage third-order discontinuous Galerkin run.

    Per step the coupled system for a = U^{j-2/3}, b = U^j is

        (I + (5 tau/12) L) a - (tau/12) L b = U^{j-1} + (tau/12)(5 f^{j-2/3} - f^j)
        (3 tau/4) L a + (I + (tau/4) L) b  = U^{j-1} + (tau/4)(3 f^{j-2/3} + f^j)

    assembled as one dense block system and solved by LU, factorisations
    cached per step size.
    """
    op = _operator(problem, grid, operator)
    pts = mesh.points
    m = op.interior_matrix.shape[0]
    eye = np.eye(m)
    A = op.interior_matrix
    lus: dict = {}
    u = _initial_field(problem, grid)
    f_prev = _forcing(problem, grid, 0.0)
    records = []
    for j in range(1, mesh.num_steps + 1):
        t_prev, t_cur = float(pts[j - 1]), float(pts[j])
        tau = t_cur - t_prev
        f_stage = _forcing(problem, grid, t_cur - TWO_THIRDS * tau)
        f_mid = _forcing(problem, grid, t_cur - 0.5 * tau)
        f_cur = _forcing(problem, grid, t_cur)
        lu = lus.get(tau)
        if lu is None:
            big = np.block(
                [
                    [eye + (5.0 * tau / 12.0) * A, -(tau / 12.0) * A],
                    [(3.0 * tau / 4.0) * A, eye + (tau / 4.0) * A],
                ]
            )
            lu = lu_factor(big, check_finite=False)
            if len(lus) < 200:
                lus[tau] = lu
        ui = u[1:-1]
        rhs = np.concatenate(
            [
                ui + (tau / 12.0) * (5.0 * f_stage[1:-1] - f_cur[1:-1]),
                ui + (tau / 4.0) * (3.0 * f_stage[1:-1] + f_cur[1:-1]),
            ]
        )
        sol = lu_solve(lu, rhs, check_finite=False)
        a = np.zeros_like(u)
        b = np.zeros_like(u)
        a[1:-1] = sol[:m]
        b[1:-1] = sol[m:]
        records.append(
            StepRecord(
                j, t_prev, t_cur, u, b,
                stages={"u_two_thirds": a},
                f_samples={1.0: f_prev, TWO_THIRDS: f_stage, 0.5: f_mid, 0.0: f_cur},
            )
        )
        u, f_prev = b, f_cur
    return Trajectory("dg1", problem, mesh, grid, op, records)


def run_bdf2(
    problem: ParabolicProblem,
    mesh: TimeMesh,
    grid: SpatialGrid,
    operator: Optional[EllipticOperator] = None,
) -> Trajectory:
    """Variable-step BDF-2, first step by implicit Euler.

    For j >= 2 the scheme D_t U^j + L U^j = f^j with
    D_t v^j = delta_t v^j + tau_j (delta_t v^j - delta_t v^{j-1}) / (tau_j + tau_{j-1})
    rearranges into the single shifted solve
    (I + (tau_j / a) L) U^j = U^{j-1} + (tau_j / a)(f^j + w delta_t U^{j-1}),
    a = 1 + w, w = tau_j / (tau_j + tau_{j-1}).
    """
    if mesh.num_steps < 2:
        raise ValueError("BDF-2 needs at least two time steps")
    op = _operator(problem, grid, operator)
    pts = mesh.points
    u = _initial_field(problem, grid)
    f_prev = _forcing(problem, grid, 0.0)
    records = []
    delta_prev = None
    tau_prev = 0.0
    for j in range(1, mesh.num_steps + 1):
        t_prev, t_cur = float(pts[j - 1]), float(pts[j])
        tau = t_cur - t_prev
        f_mid = _forcing(problem, grid, t_cur - 0.5 * tau)
        f_cur = _forcing(problem, grid, t_cur)
        if j == 1:
            u_new = op.solve_shifted(tau, u + tau * f_cur)
        else:
            w = tau / (tau + tau_prev)
            a = 1.0 + w
            rhs = u + (tau / a) * (f_cur + w * delta_prev)
            u_new = op.solve_shifted(tau / a, rhs)
        delta_prev = (u_new - u) / tau
        records.append(
            StepRecord(
                j, t_prev, t_cur, u, u_new,
                f_samples={1.0: f_prev, 0.5: f_mid, 0.0: f_cur},
            )
        )
        u, f_prev, tau_prev = u_new, f_cur, tau
    return Trajectory("bdf2", problem, mesh, grid, op, records)


def run_reference(
    problem: ParabolicProblem,
    mesh: TimeMesh,
    grid: SpatialGrid,
    operator: Optional[EllipticOperator] = None,
) -> Trajectory:
    """Order-5 reference: 3-stage Radau IIA collocation on the same mesh.

    Stage values solve (I + tau (A (x) L)) (U_1; U_2; U_3) stacked over the
    interior nodes; the last stage is the nodal value (the method is
    stiffly accurate).
    """
    op = _operator(problem, grid, operator)
    pts = mesh.points
    m = op.interior_matrix.shape[0]
    lus: dict = {}
    u = _initial_field(problem, grid)
    records = []
    for j in range(1, mesh.num_steps + 1):
        t_prev, t_cur = float(pts[j - 1]), float(pts[j])
        tau = t_cur - t_prev
        lu = lus.get(tau)
        if lu is None:
            big = np.eye(3 * m) + tau * np.kron(RADAU_A, op.interior_matrix)
            lu = lu_factor(big, check_finite=False)
            if len(lus) < 200:
                lus[tau] = lu
        fs = np.empty((3, m))
        for i in range(3):
            fs[i] = _forcing(problem, grid, t_prev + RADAU_C[i] * tau)[1:-1]
        rhs = np.tile(u[1:-1], 3) + tau * (RADAU_A @ fs).ravel()
        sol = lu_solve(lu, rhs, check_finite=False)
        u_new = np.zeros_like(u)
        u_new[1:-1] = sol[2 * m :]
        records.append(StepRecord(j, t_prev, t_cur, u, u_new))
        u = u_new
    return Trajectory("reference", problem, mesh, grid, op, records)


def final_error(
    traj: Trajectory,
    ref_traj: Trajectory,
    grid: SpatialGrid,
    sampling: int = 1001,
) -> float:
    """Maximum norm of U^M minus the reference at final time."""
    if traj.grid is not ref_traj.grid and traj.grid.degree != ref_traj.grid.degree:
        raise ValueError("trajectories live on different grids")
    if traj.mesh.horizon != ref_traj.mesh.horizon:
        raise ValueError("trajectories end at different times")
    return max_norm(traj.final - ref_traj.final, grid, sampling)
