"""Bias factor for the predicted risk, its variance, and asymptotic limits.

The risk-squared ratio Q = (true risk)^2 / (predicted risk)^2 concentrates
around Tr(B) Tr(B^-) / (T q) with q = T - n - 1 as n and T grow with
n/T -> r < 1; multiplying the predicted risk by the square root of that
factor recenters the ratio at one.  The factor and the variance formula
are exact for B proportional to the identity and asymptotic for general
weighting matrices (see the README's accuracy notes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, ParameterError, RegimeError
from .estimators import WeightMatrix


@dataclass(frozen=True)
class CorrectionFactor:
    """Correction summary for one (B, n, T) configuration."""

    n: int
    t: int
    q: int
    eq_mean: float
    var_q: float | None
    asymptotic_limit: float | None
    kind: str


def _check_regime(n: int, t: int, minimum_q: int) -> int:
    q = t - n - 1
    if q < minimum_q:
        raise RegimeError(
            f"need q = T - n - 1 >= {minimum_q}, got q = {q} (T = {t}, n = {n})"
        )
    return q


def bias_factor(weight: WeightMatrix, n: int, t: int) -> float:
    """Mean of Q: Tr(B) Tr(B^-) / (T (T - n - 1)).

    Uses the pseudo-inverse trace, so rank-deficient weighting matrices
    (e.g. the sample-covariance projector) are accepted.
    """
    if weight.t != t:
        raise DomainError(f"weight matrix is {weight.t} x {weight.t}, expected T = {t}")
    q = _check_regime(n, t, 1)
    return weight.tr_b * weight.tr_b_pinv / (t * q)


def _variance_coefficients(t: int, q: int) -> tuple[float, float]:
    a1 = 2 * t**2 * q - 2 * t * q**2 + 2 * t**2 + 2 * t + 2 * q**2 - 2 * q - 4
    a2 = t * q * (2 * t - 2 * q + 2 * t * q - 2)
    return float(a1), float(a2)


def variance_of_q(weight: WeightMatrix, n: int, t: int) -> float:
    """Finite-sample variance of Q (defined for q > 2)."""
    if weight.t != t:
        raise DomainError(f"weight matrix is {weight.t} x {weight.t}, expected T = {t}")
    q = _check_regime(n, t, 3)
    a1, a2 = _variance_coefficients(t, q)
    numer = weight.tr_b**2 * (a1 * weight.tr_b_pinv**2 + a2 * weight.tr_b_pinv_sq)
    denom = t**2 * (t + 2) * (t - 1) * q**2 * (q - 2) * (q + 1)
    return numer / denom


def asymptotic_limit(kind: str, *, r: float, c: float | None = None,
                     rank_fraction: float | None = None) -> float:
    """Limiting value of Q as n, T -> infinity with n/T -> r < 1.

    - mle: 1 / (1 - r)
    - idempotent: rho^2 / (1 - r) with rho the limiting rank fraction
    - ewma: (e^c - 1)^2 / (c^2 (1 - r) e^c) with c = (1 - lambda) T held
      fixed as lambda -> 1; the c -> 0 limit recovers the mle value.
    """
    if not 0.0 < r < 1.0:
        raise RegimeError(f"aspect ratio must satisfy 0 < r < 1, got {r}")
    if kind == "mle":
        return 1.0 / (1.0 - r)
    if kind == "idempotent":
        rho = 1.0 if rank_fraction is None else rank_fraction
        if not 0.0 < rho <= 1.0:
            raise ParameterError(f"rank fraction must lie in (0, 1], got {rho}")
        return rho**2 / (1.0 - r)
    if kind == "ewma":
        if c is None or c <= 0.0:
            raise ParameterError(f"ewma limit needs c > 0, got {c}")
        return math.expm1(c) ** 2 / (c**2 * (1.0 - r) * math.exp(c))
    raise ParameterError(f"no asymptotic limit for weighting kind {kind!r}")


def asymptotic_limit_for_weight(weight: WeightMatrix, n: int, t: int) -> float | None:
    """Asymptotic limit matched to a concrete weight matrix, if one exists."""
    r = n / t
    if weight.kind == "mle":
        return asymptotic_limit("mle", r=r)
    if weight.kind == "sample_cov":
        return asymptotic_limit("idempotent", r=r, rank_fraction=(t - 1) / t)
    if weight.kind == "idempotent":
        return asymptotic_limit("idempotent", r=r, rank_fraction=weight.rank / t)
    if weight.kind == "ewma":
        lam = weight.params["lam"]
        return asymptotic_limit("ewma", r=r, c=(1.0 - lam) * t)
    return None


def scale_predicted_risk(predicted: float, factor: float) -> float:
    """Rescale a predicted risk by sqrt(factor).

    Q is a risk-squared ratio, so multiplying the predicted risk by
    sqrt(E(Q)) recenters predicted/true at one.
    """
    if factor <= 0.0:
        raise DomainError(f"scale factor must be positive, got {factor}")
    return predicted * math.sqrt(factor)


def correction_summary(weight: WeightMatrix, n: int, t: int) -> CorrectionFactor:
    """Bundle mean, variance (when defined) and asymptotic limit."""
    q = _check_regime(n, t, 1)
    mean = bias_factor(weight, n, t)
    var_q = variance_of_q(weight, n, t) if q > 2 else None
    return CorrectionFactor(
        n=n, t=t, q=q, eq_mean=mean, var_q=var_q,
        asymptotic_limit=asymptotic_limit_for_weight(weight, n, t),
        kind=weight.kind,
    )
