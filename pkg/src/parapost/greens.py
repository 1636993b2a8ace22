"""Heat-kernel decay envelopes and the interval coefficients built from them.

Every error bound in :mod:`parapost.estimators` is a weighted sum of
per-interval coefficients.  Each coefficient is an integral of a polynomial
weight against an envelope

    phi_p(t) = (kappa_p / t**p + kappa_p') * exp(-gamma * t),   p = 0, 1, 2,

that dominates the L1-in-space norm of the p-th time derivative of the
kernel of the adjoint parabolic problem.  This module evaluates the
envelopes and the interval integrals: in closed form where one exists, by a
cancellation-safe alternating series where the closed form loses digits,
and by adaptive Gauss-Kronrod quadrature for the two weights that have no
stated closed form.

All functions are pure; instances of the two dataclasses are immutable and
safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

__all__ = [
    "GreenFunctionBounds",
    "Interval",
    "phi",
    "theta",
    "rho",
    "mu",
    "phi_cap",
    "phi_star",
    "psi_cap",
    "mu_star",
    "sigma_star",
]

# Use the alternating series for mu when tau / (T - t_hi) is at most this;
# there the series is geometric while the log recursion cancels.
SERIES_SWITCH = 0.5
# Stop the series once a term drops below this relative to the partial sum.
SERIES_RELTOL = 1e-15
# Relative tolerance of the adaptive quadratures (mu_star, sigma_star).
QUAD_RELTOL = 1e-12

_KAPPA_FIELDS = ("kappa0", "kappa1", "kappa2", "kappa1p", "kappa2p", "gamma")


@dataclass(frozen=True)
class GreenFunctionBounds:
    """Constants of the kernel envelopes phi_p.

    ``kappa1p`` and ``kappa2p`` are the additive constants kappa_1' and
    kappa_2'; the corresponding kappa_0' is identically zero.  ``gamma`` is
    the exponential decay rate (one over time).
    """

    kappa0: float
    kappa1: float
    kappa2: float
    kappa1p: float = 0.0
    kappa2p: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        for name in _KAPPA_FIELDS:
            value = getattr(self, name)
            if not value >= 0.0:
                raise ValueError(f"{name} must be non-negative, got {value!r}")


@dataclass(frozen=True)
class Interval:
    """One time-mesh interval (t_lo, t_hi) inside the horizon [0, T_final]."""

    t_lo: float
    t_hi: float
    T_final: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.t_lo < self.t_hi <= self.T_final):
            raise ValueError(
                f"need 0 <= t_lo < t_hi <= T_final, got "
                f"({self.t_lo}, {self.t_hi}, {self.T_final})"
            )

    @property
    def tau(self) -> float:
        return self.t_hi - self.t_lo

    @property
    def gap(self) -> float:
        """Distance T_final - t_hi to the horizon; zero on the last interval."""
        return self.T_final - self.t_hi


def phi(bounds: GreenFunctionBounds, p: int, t: float) -> float:
    """Envelope (kappa_p / t**p + kappa_p') * exp(-gamma t), p in {0, 1, 2}."""
    if p == 0:
        if t < 0.0:
            raise ValueError("phi_0 needs t >= 0")
        return bounds.kappa0 * math.exp(-bounds.gamma * t)
    if p not in (1, 2):
        raise ValueError(f"p must be 0, 1 or 2, got {p}")
    if t <= 0.0:
        raise ValueError(f"phi_{p} is singular at t <= 0")
    if p == 1:
        kap, kapp = bounds.kappa1, bounds.kappa1p
    else:
        kap, kapp = bounds.kappa2, bounds.kappa2p
    return (kap / t**p + kapp) * math.exp(-bounds.gamma * t)


def theta(bounds: GreenFunctionBounds, iv: Interval) -> float:
    """Coefficient bounding the integral of phi_1(T - s) over the interval.

    theta = kappa_1 * log(1 + tau / (T - t_hi)) + kappa_1' * tau.  The
    integral itself is at most exp(-gamma (T - t_hi)) * theta.
    """
    if bounds.kappa1 == 0.0:
        return bounds.kappa1p * iv.tau
    if iv.gap <= 0.0:
        raise ValueError("theta diverges on the final interval when kappa1 > 0")
    return bounds.kappa1 * math.log1p(iv.tau / iv.gap) + bounds.kappa1p * iv.tau


def rho(bounds: GreenFunctionBounds, iv: Interval) -> float:
    """Coefficient bounding the integral of (t_hi - s) phi_1(T - s).

    rho = kappa_1 [tau - (T - t_hi) log(1 + tau/(T - t_hi))] + kappa_1' tau^2/2.
    The bracket tends to tau as t_hi -> T, so the last interval gets the
    finite limit kappa_1 * tau.
    """
    if iv.gap <= 0.0:
        bracket = iv.tau
    else:
        bracket = iv.tau - iv.gap * math.log1p(iv.tau / iv.gap)
    return bounds.kappa1 * bracket + bounds.kappa1p * iv.tau**2 / 2.0


def _mu_series(k: int, tau: float, x: float) -> float:
    # mu = tau^(k+1) * sum_{l>=1} (-1)^(l+1) x^l / ((l+k)(l+k+1)), x < 1.
    total = 0.0
    power = 1.0
    for ell in range(1, 400):
        power *= x
        term = power / ((ell + k) * (ell + k + 1))
        total += term if ell % 2 == 1 else -term
        if term <= SERIES_RELTOL * abs(total):
            break
    return tau ** (k + 1) * total


def mu(k: int, iv: Interval) -> float:
    """Integral of (t_hi - s)^k (s - t_lo) / (T - s) over the interval.

    Evaluated by the closed-form log recursion when tau is comparable to
    T - t_hi, and by the alternating series when tau / (T - t_hi) <= 1/2,
    where the recursion subtracts near-equal quantities.  On the final
    interval (t_hi = T) the integral is finite for k >= 1 and equals
    tau^(k+1) / (k (k+1)); it diverges for k = 0.
    """
    if k < 0:
        raise ValueError("k must be a non-negative integer")
    if iv.gap <= 0.0:
        if k == 0:
            raise ValueError("mu_0 diverges when t_hi = T_final")
        return iv.tau ** (k + 1) / (k * (k + 1))
    x = iv.tau / iv.gap
    if x <= SERIES_SWITCH:
        return _mu_series(k, iv.tau, x)
    value = -iv.tau + (iv.T_final - iv.t_lo) * math.log1p(x)
    for i in range(1, k + 1):
        value = iv.tau ** (i + 1) / (i * (i + 1)) - iv.gap * value
    return value


def phi_cap(bounds: GreenFunctionBounds, k: int, iv: Interval) -> float:
    """Phi_k = kappa_1 mu_k + kappa_1' tau^(k+2) / ((k+1)(k+2))."""
    mu_term = bounds.kappa1 * mu(k, iv) if bounds.kappa1 > 0.0 else 0.0
    return mu_term + bounds.kappa1p * iv.tau ** (k + 2) / ((k + 1) * (k + 2))


# Total variation of (t_hi - s)^k (s - t_lo) over the interval is
# shape[k] * tau^(k+1): the weight rises from 0 to its maximum and falls
# back to 0 (k >= 1), or is monotone (k = 0).
_PHI_STAR_SHAPE = {0: 1.0, 1: 0.5, 2: 8.0 / 27.0}


def phi_star(bounds: GreenFunctionBounds, k: int, iv: Interval) -> float:
    """Phi*_k = kappa_0 times the total variation of (t_hi - s)^k (s - t_lo)."""
    try:
        shape = _PHI_STAR_SHAPE[k]
    except KeyError:
        raise ValueError(f"phi_star supports k in {{0, 1, 2}}, got {k}") from None
    return bounds.kappa0 * shape * iv.tau ** (k + 1)


def psi_cap(bounds: GreenFunctionBounds, k: int, iv: Interval) -> float:
    """Psi_k = min(Phi_k, Phi*_k), the sharper of the two route bounds."""
    return min(phi_cap(bounds, k, iv), phi_star(bounds, k, iv))


def mu_star(iv: Interval) -> float:
    """Adaptive quadrature of omega(s) / (T - s)^2 over the interval.

    omega(s) = (t_hi - s)(s - t_lo) / 2 is the parabolic bump weight.
    Requires T_final > t_hi, else the integral diverges.
    """
    if iv.gap <= 0.0:
        raise ValueError("mu_star needs T_final > t_hi")
    t_lo, t_hi, T = iv.t_lo, iv.t_hi, iv.T_final

    def integrand(s: float) -> float:
        return 0.5 * (t_hi - s) * (s - t_lo) / (T - s) ** 2

    value, _ = quad(integrand, t_lo, t_hi, epsabs=0.0, epsrel=QUAD_RELTOL, limit=200)
    return value


def sigma_star(iv: Interval) -> float:
    """Adaptive quadrature of |pi(s)| / (T - s)^2 over the interval.

    pi(s) = (t_hi - s)(t_mid - s)(t_lo - s) / 6 changes sign at the interval
    midpoint, so the quadrature is split there.
    """
    if iv.gap <= 0.0:
        raise ValueError("sigma_star needs T_final > t_hi")
    t_lo, t_hi, T = iv.t_lo, iv.t_hi, iv.T_final
    t_mid = 0.5 * (t_lo + t_hi)

    def integrand(s: float) -> float:
        return abs((t_hi - s) * (t_mid - s) * (t_lo - s)) / (6.0 * (T - s) ** 2)

    left, _ = quad(integrand, t_lo, t_mid, epsabs=0.0, epsrel=QUAD_RELTOL, limit=200)
    right, _ = quad(integrand, t_mid, t_hi, epsabs=0.0, epsrel=QUAD_RELTOL, limit=200)
    return left + right
