"""Minimum-variance portfolio mathematics.

All three operations act on inverse covariance matrices directly: the
optimal weights are row sums of the inverse normalized by its grand sum,
the minimized risk is the reciprocal square root of the grand sum, and
the risk-squared ratio between two covariance inputs is the ratio of the
grand sums of their inverses.  Short positions are allowed (the budget
constraint is the only constraint).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegeneratePortfolioError, DomainError

_GRAND_SUM_ATOL = 1e-12


def _as_square(matrix, what):
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"{what} must be square, got shape {m.shape}")
    return m


def spd_inverse(matrix) -> np.ndarray:
    """Inverse of an SPD matrix via Cholesky; fails loudly on non-SPD input."""
    m = _as_square(matrix, "matrix")
    try:
        factor = scipy.linalg.cho_factor(m, lower=True, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise DomainError(f"matrix is not positive definite: {exc}") from exc
    inv = scipy.linalg.cho_solve(factor, np.eye(m.shape[0]), check_finite=False)
    return 0.5 * (inv + inv.T)


def min_variance_weights(sigma_inv) -> np.ndarray:
    """Budget-constrained minimum-variance weights from an inverse covariance.

    w_i = (row sum of the inverse)_i / (grand sum of the inverse); the
    output sums to one and may contain negative entries (short selling).
    """
    inv = _as_square(sigma_inv, "inverse covariance")
    grand = float(inv.sum())
    if abs(grand) < _GRAND_SUM_ATOL:
        raise DegeneratePortfolioError(
            f"grand sum of the inverse is {grand:.3e}; weights undefined"
        )
    return inv.sum(axis=1) / grand


def portfolio_risk(sigma_inv) -> float:
    """Minimum-variance risk 1 / sqrt(grand sum of the inverse covariance)."""
    inv = _as_square(sigma_inv, "inverse covariance")
    grand = float(inv.sum())
    if grand <= 0.0:
        raise DomainError(
            f"grand sum of the inverse must be positive, got {grand:.3e} "
            "(input is not an SPD inverse)"
        )
    return 1.0 / np.sqrt(grand)


def q_ratio(sigma_inv_true, sigma_inv_est) -> float:
    """(true risk)^2 / (predicted risk)^2 as a ratio of inverse grand sums."""
    true_grand = float(_as_square(sigma_inv_true, "true inverse").sum())
    est_grand = float(_as_square(sigma_inv_est, "estimated inverse").sum())
    if true_grand <= 0.0 or est_grand <= 0.0:
        raise DomainError("both inverse grand sums must be positive")
    return est_grand / true_grand


@dataclass(frozen=True)
class RiskReport:
    """Risk figures for one trial, in return standard-deviation units."""

    true_risk: float
    predicted_risk: float
    q: float
    bias_factor: float
    corrected_risk: float


def make_risk_report(sigma_inv_true, sigma_inv_est, bias_factor: float) -> RiskReport:
    """Assemble the per-trial report; corrected = predicted * sqrt(bias)."""
    if bias_factor <= 0.0:
        raise DomainError(f"bias factor must be positive, got {bias_factor}")
    true_risk = portfolio_risk(sigma_inv_true)
    predicted_risk = portfolio_risk(sigma_inv_est)
    return RiskReport(
        true_risk=true_risk,
        predicted_risk=predicted_risk,
        q=q_ratio(sigma_inv_true, sigma_inv_est),
        bias_factor=bias_factor,
        corrected_risk=predicted_risk * np.sqrt(bias_factor),
    )
