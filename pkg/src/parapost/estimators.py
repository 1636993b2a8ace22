"""A posteriori bounds for the final-time maximum-norm error.

Every estimator walks the records of a :class:`~parapost.steppers.Trajectory`
and produces an :class:`EstimatorReport`: per step a dictionary of named
non-negative components, the exponential weight exp(-gamma (T - t_j)), and
the grand total

    total = sum_j weight_j * (sum of the step's components),

which bounds the final-time error of the scheme.  Components are stored
unweighted so they can be plotted and compared across steps directly.

The data-oscillation components integrate the norm of the deficiency
between the forcing and one of its interpolants over a step; those
integrals are approximated by the quadratures in :class:`QuadRule`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .greens import GreenFunctionBounds, mu_star, psi_cap, rho, sigma_star, theta
from .spatial import EllipticOperator, Field, SpatialGrid, max_norm
from .steppers import TWO_THIRDS, StepRecord, Trajectory

__all__ = [
    "QuadRule",
    "OSC_KINDS",
    "StepEstimate",
    "EstimatorReport",
    "data_oscillation",
    "estimate_backward_euler",
    "estimate_crank_nicolson",
    "estimate_extrapolated",
    "asymptotic_euler_bounds",
    "estimate_dg1",
    "estimate_bdf2",
    "component_trace",
]


class QuadRule(str, enum.Enum):
    """Quadrature used for the data-oscillation integrals."""

    TRAPEZIUM = "trapezium"
    SIMPSON = "simpson"
    SIMPSON_TWO_PANEL = "simpson_two_panel"
    GAUSS_ADAPTIVE = "gauss_adaptive"


OSC_KINDS = frozenset({"f_bar", "f_hat", "f_tilde", "f_breve", "F_hat_extrap"})

BE_VARIANTS = ("DLM", "KL1", "DLMKL", "LR", "COMBINED", "KL2")
CN_VARIANTS = ("CN1", "CN2", "CNCOMB", "CNKL2")


@dataclass(frozen=True)
class StepEstimate:
    """Named components of one step, stored unweighted."""

    index: int
    t: float
    components: dict
    weight: float

    @property
    def step_sum(self) -> float:
        return sum(self.components.values())

    @property
    def weighted(self) -> float:
        return self.weight * self.step_sum


@dataclass(frozen=True)
class EstimatorReport:
    """Per-step breakdown plus the weighted grand total."""

    theorem: str
    steps: list
    total: float

    def component(self, name: str) -> np.ndarray:
        """Series of one component over the steps (0 where absent)."""
        return np.array([s.components.get(name, 0.0) for s in self.steps])


def _assemble(tag: str, mesh, gamma: float, per_step: list) -> EstimatorReport:
    pts = mesh.points
    T = mesh.horizon
    steps = []
    total = 0.0
    for j, comps in enumerate(per_step, start=1):
        weight = math.exp(-gamma * (T - pts[j]))
        est = StepEstimate(index=j, t=float(pts[j]), components=comps, weight=weight)
        total += weight * est.step_sum
        steps.append(est)
    return EstimatorReport(theorem=tag, steps=steps, total=total)


# ---------------------------------------------------------------------------
# data oscillation


def _interpolant_values(kind: str, step: StepRecord, offsets) -> list:
    """Value of the interpolant of f at t_j - q tau for each offset q."""
    f1, f0 = step.f(1.0), step.f(0.0)
    if kind == "f_bar":
        return [f0 for _ in offsets]
    if kind in ("f_hat", "F_hat_extrap"):
        return [(1.0 - q) * f0 + q * f1 for q in offsets]
    if kind == "f_tilde":
        delta = f0 - 2.0 * step.f(0.5) + f1
        beta_omega = [-4.0 * q * (1.0 - q) * delta for q in offsets]
        return [(1.0 - q) * f0 + q * f1 + bw for q, bw in zip(offsets, beta_omega)]
    if kind == "f_breve":
        fs = step.f(TWO_THIRDS)
        curv = 0.5 * (f0 - 3.0 * fs + 2.0 * f1)
        out = []
        for q in offsets:
            r = 1.0 - q  # (s - t_{j-1}) / tau
            zeta = 3.0 * (r - 1.0) * (r - 1.0 / 3.0)
            out.append(f0 - 1.5 * q * (f0 - fs) + curv * zeta)
        return out
    raise ValueError(f"unknown oscillation kind {kind!r}")


def data_oscillation(
    kind: str,
    step: StepRecord,
    rule: QuadRule | str,
    grid: SpatialGrid,
    sampling: int = 1001,
    forcing=None,
    fhat_variant: str = "paper",
) -> float:
    """Approximate the integral over the step of ||f - interpolant||_inf.

    ``kind`` selects the interpolant: the right-endpoint constant (f_bar),
    the linear interpolant (f_hat, and F_hat_extrap for the extrapolated
    scheme), the quadratic through the midpoint (f_tilde) and the quadratic
    through the interior collocation point (f_breve).  Under Simpson's rule
    each kind reduces to the closed-form combination of the recorded
    samples; ``fhat_variant`` picks between the halved ("paper") and plain
    ("consistent") Simpson constant for F_hat_extrap.
    """
    rule = QuadRule(rule)
    if kind not in OSC_KINDS:
        raise ValueError(f"unknown oscillation kind {kind!r}")
    tau = step.tau
    nrm = lambda f: max_norm(f, grid, sampling)

    if rule is QuadRule.GAUSS_ADAPTIVE:
        if forcing is None:
            raise ValueError("gauss_adaptive oscillation needs the forcing callable")
        nodes = grid.nodes

        def integrand(s: float) -> float:
            q = (step.t_cur - s) / tau
            (interp,) = _interpolant_values(kind, step, [q])
            return nrm(np.asarray(forcing(nodes, s), dtype=float) - interp)

        value, _ = quad(integrand, step.t_prev, step.t_cur, epsabs=0.0,
                        epsrel=1e-10, limit=200)
        return value

    if rule is QuadRule.TRAPEZIUM:
        # Every interpolant matches f at both endpoints except f_bar.
        if kind == "f_bar":
            return 0.5 * tau * nrm(step.f(1.0) - step.f(0.0))
        return 0.0

    if rule is QuadRule.SIMPSON:
        if kind == "f_bar":
            f0 = step.f(0.0)
            return (tau / 6.0) * (nrm(step.f(1.0) - f0) + 4.0 * nrm(step.f(0.5) - f0))
        if kind == "f_hat":
            return (tau / 3.0) * nrm(step.f(0.0) - 2.0 * step.f(0.5) + step.f(1.0))
        if kind == "F_hat_extrap":
            if fhat_variant not in ("paper", "consistent"):
                raise ValueError(f"unknown fhat_variant {fhat_variant!r}")
            scale = tau / 6.0 if fhat_variant == "paper" else tau / 3.0
            return scale * nrm(step.f(0.0) - 2.0 * step.f(0.5) + step.f(1.0))
        if kind == "f_tilde":
            lo, hi = _interpolant_values(kind, step, [0.75, 0.25])
            return (tau / 3.0) * (nrm(step.f(0.75) - lo) + nrm(step.f(0.25) - hi))
        # f_breve: Simpson with vanishing endpoint values
        (mid,) = _interpolant_values(kind, step, [0.5])
        return (2.0 * tau / 3.0) * nrm(step.f(0.5) - mid)

    # composite Simpson on the two half-panels, five sample points
    offsets = [1.0, 0.75, 0.5, 0.25, 0.0]
    interp = _interpolant_values(kind, step, offsets)
    g = [nrm(step.f(q) - v) for q, v in zip(offsets, interp)]
    return (tau / 12.0) * (g[0] + 4.0 * g[1] + 2.0 * g[2] + 4.0 * g[3] + g[4])


# ---------------------------------------------------------------------------
# shared pieces


def _check_method(traj: Trajectory, expected: str, what: str) -> None:
    if traj.method != expected:
        raise ValueError(f"{what} needs a {expected!r} trajectory, got {traj.method!r}")


def _psi_fields(traj: Trajectory, op: EllipticOperator) -> list:
    """psi^j = (L U - f)^j for j = 0..M, boundary rows included."""
    first = traj.records[0]
    psi = [op.apply_full(first.u_prev) - first.f(1.0)]
    for rec in traj.records:
        psi.append(op.apply_full(rec.u_cur) - rec.f(0.0))
    return psi


# ---------------------------------------------------------------------------
# backward Euler (DLM / KL1 / DLMKL / LR / COMBINED / KL2)


def estimate_backward_euler(
    traj: Trajectory,
    green: GreenFunctionBounds,
    variant: str,
    rule: QuadRule | str = QuadRule.SIMPSON,
    grid: Optional[SpatialGrid] = None,
    sampling: int = 1001,
    J: Optional[int] = None,
) -> EstimatorReport:
    """Final-time error bound for an implicit-Euler trajectory.

    Variants: ``DLM`` (constant-forcing oscillation plus the jump of L U),
    ``KL1`` (the kernel-derivative route through rho_j), ``DLMKL`` (their
    per-step minimum), ``LR`` (linear forcing interpolant plus second
    differences), ``COMBINED`` (per-step minimum of DLMKL and LR) and
    ``KL2`` (the split-sum bound with the parabolic weight; ``J`` selects
    where the integration-by-parts window starts, default 1).
    """
    _check_method(traj, "euler", "estimate_backward_euler")
    variant = variant.upper()
    if variant not in BE_VARIANTS:
        raise ValueError(f"unknown backward-Euler variant {variant!r}")
    grid = grid if grid is not None else traj.grid
    op = traj.operator
    mesh = traj.mesh
    M = mesh.num_steps
    pts = mesh.points
    T = mesh.horizon
    k0 = green.kappa0
    nrm = lambda f: max_norm(f, grid, sampling)
    forcing = traj.problem.forcing
    osc = lambda kind, rec: data_oscillation(kind, rec, rule, grid, sampling, forcing)

    if variant == "KL2":
        J = 1 if J is None else int(J)
        if not 1 <= J <= M:
            raise ValueError(f"KL2 needs 1 <= J <= M, got J={J}")

    need_dlu = variant in ("DLM", "DLMKL", "COMBINED", "KL2")
    need_du = variant in ("KL1", "DLMKL", "COMBINED", "KL2")
    need_d2 = variant in ("LR", "COMBINED")

    if need_d2:
        rec0 = traj.records[0]
        delta_prev = rec0.f(1.0) - op.apply_full(rec0.u_prev)  # delta_t U^0 := f^0 - L U^0

    if variant == "KL2":
        rec_m = traj.records[-1]
        du_m = (rec_m.u_cur - rec_m.u_prev) / rec_m.tau
        ndu_m = nrm(du_m)
        tau_m = rec_m.tau

    per_step = []
    for rec in traj.records:
        j = rec.index
        tau = rec.tau
        iv = mesh.interval(j)
        jump = rec.u_cur - rec.u_prev
        du = jump / tau
        comps: dict = {}

        eta_dlu = 0.5 * k0 * tau**2 * nrm(op.apply_full(jump) / tau) if need_dlu else None
        eta_du = rho(green, iv) * nrm(du) if need_du else None

        if variant == "DLM":
            comps["eta_f_bar"] = k0 * osc("f_bar", rec)
            comps["eta_delta_LU"] = eta_dlu
        elif variant == "KL1":
            comps["eta_f_bar"] = k0 * osc("f_bar", rec)
            comps["eta_delta_U"] = eta_du
        elif variant == "DLMKL":
            comps["eta_f_bar"] = k0 * osc("f_bar", rec)
            comps["eta_min"] = min(eta_du, eta_dlu)
        elif variant == "LR":
            comps["eta_f_hat"] = k0 * osc("f_hat", rec)
            d2 = (du - delta_prev) / tau
            comps["eta_delta2_U"] = 0.5 * k0 * tau**2 * nrm(d2)
            delta_prev = du
        elif variant == "COMBINED":
            eta_fbar = k0 * osc("f_bar", rec)
            eta_fhat = k0 * osc("f_hat", rec)
            d2 = (du - delta_prev) / tau
            eta_d2 = 0.5 * k0 * tau**2 * nrm(d2)
            delta_prev = du
            s_jump = eta_fbar + min(eta_du, eta_dlu)
            s_second = eta_fhat + eta_d2
            comps["eta_combined"] = min(s_jump, s_second)
        else:  # KL2
            comps["eta_f_bar"] = k0 * osc("f_bar", rec)
            if j <= J - 1 or j == M:
                comps["eta_min"] = min(eta_du, eta_dlu)
            if J <= j <= M - 1:
                ndu = nrm(du)
                comps["eta_delta_U_star"] = (
                    green.kappa2 * mu_star(iv) + green.kappa2p * tau**3 / 6.0
                ) * ndu
                w_field = 0.5 * (jump - tau_m * du_m)
                comps["eta_W"] = theta(green, iv) * nrm(w_field)
            if j == M:
                gammas = math.exp(-green.gamma * (T - pts[M - 1])) + math.exp(
                    -green.gamma * (T - pts[J - 1])
                )
                comps["eta_endpoint"] = 0.5 * k0 * tau_m * gammas * ndu_m
        per_step.append(comps)

    tag = f"KL2(J={J})" if variant == "KL2" else variant
    return _assemble(tag, mesh, green.gamma, per_step)


# ---------------------------------------------------------------------------
# Crank-Nicolson (CN1 / CN2 / CNCOMB / CNKL2)


def estimate_crank_nicolson(
    traj: Trajectory,
    green: GreenFunctionBounds,
    variant: str,
    rule: QuadRule | str = QuadRule.SIMPSON,
    grid: Optional[SpatialGrid] = None,
    sampling: int = 1001,
    elliptic: Optional[EllipticOperator] = None,
    J: Optional[int] = None,
) -> EstimatorReport:
    """Final-time error bound for a Crank-Nicolson trajectory.

    ``CN1`` uses the linear forcing interpolant and the jump of
    psi = L U - f; ``CN2`` replaces them by the quadratic interpolant and
    the ellipticly corrected jump (one L q = beta solve per step, performed
    with ``elliptic`` or the trajectory's own operator); ``CNCOMB`` takes
    the per-step minimum; ``CNKL2`` is the split-sum variant.
    """
    _check_method(traj, "cn", "estimate_crank_nicolson")
    variant = variant.upper()
    if variant not in CN_VARIANTS:
        raise ValueError(f"unknown Crank-Nicolson variant {variant!r}")
    grid = grid if grid is not None else traj.grid
    op = traj.operator
    ell = elliptic if elliptic is not None else op
    mesh = traj.mesh
    M = mesh.num_steps
    pts = mesh.points
    T = mesh.horizon
    k0 = green.kappa0
    nrm = lambda f: max_norm(f, grid, sampling)
    forcing = traj.problem.forcing
    osc = lambda kind, rec: data_oscillation(kind, rec, rule, grid, sampling, forcing)

    if variant == "CNKL2":
        J = 1 if J is None else int(J)
        if not 1 <= J <= M:
            raise ValueError(f"CNKL2 needs 1 <= J <= M, got J={J}")

    psi = _psi_fields(traj, op)
    dpsi = [None] + [
        (psi[j] - psi[j - 1]) / traj.records[j - 1].tau for j in range(1, M + 1)
    ]

    if variant == "CNKL2":
        tau_m = traj.records[-1].tau
        ndpsi_m = nrm(dpsi[M])

    per_step = []
    for rec in traj.records:
        j = rec.index
        tau = rec.tau
        iv = mesh.interval(j)
        comps: dict = {}
        if variant == "CN1":
            comps["eta_f_hat"] = k0 * osc("f_hat", rec)
            comps["eta_delta_psi"] = 0.5 * psi_cap(green, 1, iv) * nrm(dpsi[j])
        elif variant == "CN2":
            beta = -4.0 * (rec.f(0.0) - 2.0 * rec.f(0.5) + rec.f(1.0)) / tau**2
            q = ell.solve_elliptic(beta)
            comps["eta_f_tilde"] = k0 * osc("f_tilde", rec)
            comps["eta_dpsi_q"] = 0.5 * psi_cap(green, 1, iv) * nrm(dpsi[j] - q)
        elif variant == "CNCOMB":
            half_cap = 0.5 * psi_cap(green, 1, iv)
            eta_fhat = k0 * osc("f_hat", rec)
            eta_dpsi = half_cap * nrm(dpsi[j])
            beta = -4.0 * (rec.f(0.0) - 2.0 * rec.f(0.5) + rec.f(1.0)) / tau**2
            q = ell.solve_elliptic(beta)
            eta_ftilde = k0 * osc("f_tilde", rec)
            eta_dpsi_q = half_cap * nrm(dpsi[j] - q)
            comps["eta_cn_combined"] = min(eta_fhat + eta_dpsi, eta_ftilde + eta_dpsi_q)
        else:  # CNKL2
            comps["eta_f_hat"] = k0 * osc("f_hat", rec)
            if j <= J - 1 or j == M:
                comps["eta_delta_psi"] = 0.5 * psi_cap(green, 1, iv) * nrm(dpsi[j])
            if J <= j <= M - 1:
                comps["eta_delta_psi_star"] = (
                    green.kappa2 * sigma_star(iv) + green.kappa2p * tau**4 / 144.0
                ) * nrm(dpsi[j])
                w_field = (tau**2 * dpsi[j] - tau_m**2 * dpsi[M]) / 12.0
                comps["eta_W_psi"] = theta(green, iv) * nrm(w_field)
            if j == M:
                gammas = math.exp(-green.gamma * (T - pts[M - 1])) + math.exp(
                    -green.gamma * (T - pts[J - 1])
                )
                comps["eta_endpoint"] = k0 * tau_m**2 / 12.0 * gammas * ndpsi_m
        per_step.append(comps)

    tag = f"CNKL2(J={J})" if variant == "CNKL2" else variant
    return _assemble(tag, mesh, green.gamma, per_step)


# ---------------------------------------------------------------------------
# extrapolated Euler


def estimate_extrapolated(
    traj_v: Trajectory,
    traj_w: Trajectory,
    traj_u: Trajectory,
    green: GreenFunctionBounds,
    rule: QuadRule | str = QuadRule.SIMPSON,
    grid: Optional[SpatialGrid] = None,
    sampling: int = 1001,
    elliptic: Optional[EllipticOperator] = None,
    fhat_variant: str = "paper",
) -> EstimatorReport:
    """Final-time error bound for the extrapolated Euler triple (V, W, U).

    Per step: the forcing-curvature oscillation, the jump of
    psi = L U - f of the extrapolated values, and the defect
    Z^j = W^{j-1/2} - W^{j-1} - (V^j - V^{j-1}) / 2 bounded through the
    smaller of its L-image and its kernel-derivative route.
    """
    _check_method(traj_v, "extrap-V", "estimate_extrapolated")
    _check_method(traj_w, "extrap-W", "estimate_extrapolated")
    _check_method(traj_u, "extrap", "estimate_extrapolated")
    if not (traj_v.mesh is traj_w.mesh is traj_u.mesh):
        raise ValueError("the three trajectories must share one mesh")
    grid = grid if grid is not None else traj_u.grid
    op = elliptic if elliptic is not None else traj_u.operator
    mesh = traj_u.mesh
    M = mesh.num_steps
    k0 = green.kappa0
    nrm = lambda f: max_norm(f, grid, sampling)
    forcing = traj_u.problem.forcing

    psi = _psi_fields(traj_u, op)
    per_step = []
    for rec_v, rec_w, rec_u in zip(traj_v.records, traj_w.records, traj_u.records):
        j = rec_u.index
        tau = rec_u.tau
        iv = mesh.interval(j)
        comps: dict = {}
        comps["eta_F_hat"] = k0 * data_oscillation(
            "F_hat_extrap", rec_u, rule, grid, sampling, forcing, fhat_variant
        )
        dpsi = (psi[j] - psi[j - 1]) / tau
        comps["eta_delta_psi"] = 0.5 * psi_cap(green, 1, iv) * nrm(dpsi)
        z = rec_w.stages["w_half"] - rec_w.u_prev - 0.5 * (rec_v.u_cur - rec_v.u_prev)
        lz_route = k0 * tau * nrm(op.apply_full(z))
        if iv.gap > 0.0 or green.kappa1 == 0.0:
            comps["eta_Z"] = min(lz_route, theta(green, iv) * nrm(z))
        else:
            # theta diverges on the final interval; only the L-image route remains
            comps["eta_Z"] = lz_route
        per_step.append(comps)

    return _assemble("EXTRAP", mesh, green.gamma, per_step)


def asymptotic_euler_bounds(
    traj_v: Trajectory,
    traj_w: Trajectory,
    report_extrap: EstimatorReport,
    grid: Optional[SpatialGrid] = None,
    sampling: int = 1001,
):
    """Asymptotically exact bounds for the two underlying Euler runs.

    Returns (bound_for_V, bound_for_W, wv_gap) where wv_gap is the maximum
    norm of W^M - V^M: the error of V is at most 2 wv_gap + total and the
    error of W at most wv_gap + total.
    """
    grid = grid if grid is not None else traj_w.grid
    wv_gap = max_norm(traj_w.final - traj_v.final, grid, sampling)
    return 2.0 * wv_gap + report_extrap.total, wv_gap + report_extrap.total, wv_gap


# ---------------------------------------------------------------------------
# dG(1)


def estimate_dg1(
    traj: Trajectory,
    green: GreenFunctionBounds,
    rule: QuadRule | str = QuadRule.SIMPSON,
    grid: Optional[SpatialGrid] = None,
    sampling: int = 1001,
) -> EstimatorReport:
    """Final-time error bound for a dG(1) trajectory.

    chi^j = (psi^j - 3 psi^{j-2/3} + 2 psi^{j-1}) / (2 tau_j^2) with
    psi = f - L U evaluated at the stage and nodal values.
    """
    _check_method(traj, "dg1", "estimate_dg1")
    grid = grid if grid is not None else traj.grid
    op = traj.operator
    mesh = traj.mesh
    k0 = green.kappa0
    nrm = lambda f: max_norm(f, grid, sampling)
    forcing = traj.problem.forcing

    first = traj.records[0]
    psi_prev = first.f(1.0) - op.apply_full(first.u_prev)
    per_step = []
    for rec in traj.records:
        tau = rec.tau
        iv = mesh.interval(rec.index)
        psi_stage = rec.f(TWO_THIRDS) - op.apply_full(rec.stages["u_two_thirds"])
        psi_cur = rec.f(0.0) - op.apply_full(rec.u_cur)
        chi = (psi_cur - 3.0 * psi_stage + 2.0 * psi_prev) / (2.0 * tau**2)
        comps = {
            "eta_f_breve": k0
            * data_oscillation("f_breve", rec, rule, grid, sampling, forcing),
            "eta_chi": psi_cap(green, 2, iv) * nrm(chi),
        }
        per_step.append(comps)
        psi_prev = psi_cur

    return _assemble("DG1", mesh, green.gamma, per_step)


# ---------------------------------------------------------------------------
# BDF-2


def estimate_bdf2(
    traj: Trajectory,
    green: GreenFunctionBounds,
    rule: QuadRule | str = QuadRule.SIMPSON,
    grid: Optional[SpatialGrid] = None,
    sampling: int = 1001,
) -> EstimatorReport:
    """Final-time error bound for a BDF-2 trajectory (needs M >= 3).

    The first step is bounded like a single implicit-Euler step, the second
    carries the start-up coupling, and later steps combine the second
    divided difference with the jump of consecutive second differences.
    Here delta2 v^j = (delta v^j - delta v^{j-1}) / (tau_j + tau_{j-1}).
    """
    _check_method(traj, "bdf2", "estimate_bdf2")
    mesh = traj.mesh
    M = mesh.num_steps
    if M < 3:
        raise ValueError("the BDF-2 bound needs at least three steps")
    grid = grid if grid is not None else traj.grid
    op = traj.operator
    k0 = green.kappa0
    nrm = lambda f: max_norm(f, grid, sampling)
    forcing = traj.problem.forcing
    osc = lambda kind, rec: data_oscillation(kind, rec, rule, grid, sampling, forcing)

    per_step = []
    delta_prev = None
    d2_prev = None
    tau_prev = 0.0
    for rec in traj.records:
        j = rec.index
        tau = rec.tau
        iv = mesh.interval(j)
        du = (rec.u_cur - rec.u_prev) / tau
        comps: dict = {}
        if j == 1:
            comps["eta_f_bar"] = k0 * osc("f_bar", rec)
            eta_du = rho(green, iv) * nrm(du)
            eta_dlu = 0.5 * k0 * tau**2 * nrm(op.apply_full(rec.u_cur - rec.u_prev) / tau)
            comps["eta_min"] = min(eta_du, eta_dlu)
        else:
            d2 = (du - delta_prev) / (tau + tau_prev)
            comps["eta_f_hat"] = k0 * osc("f_hat", rec)
            if j == 2:
                coeff = psi_cap(green, 1, iv) + 0.5 * k0 * tau_prev * tau
                comps["eta_delta2_U"] = coeff * nrm(d2)
            else:
                comps["eta_delta2_U"] = psi_cap(green, 1, iv) * nrm(d2)
                comps["eta_delta2_diff"] = 0.5 * k0 * tau_prev * tau * nrm(d2 - d2_prev)
            d2_prev = d2
        delta_prev = du
        tau_prev = tau
        per_step.append(comps)

    return _assemble("BDF2", mesh, green.gamma, per_step)


# ---------------------------------------------------------------------------
# traces


def component_trace(report: EstimatorReport) -> list:
    """Flatten a report into (t_j, component name, unweighted value) rows."""
    rows = []
    for step in report.steps:
        for name, value in step.components.items():
            rows.append((step.t, name, value))
    return rows
