"""Closed-form local moments: Haar orthogonal entries and inverted
compound Wishart entries at small order.

The Haar moment formula

    E[o_{i1 j1} ... o_{i2k j2k}]
        = sum over matchings sigma, tau of
          delta_sigma(i) delta_tau(j) Wg(sigma^{-1} tau; n)

is exact for every n.  The inverse compound Wishart sum

    E[w^(-1)_{i1 i2} ... w^(-1)_{i2k-1 i2k}]
        = (-1)^k sum over matchings sigma, rho of
          Tr_sigma(B^-) Wg(sigma^{-1} rho; T, -q) prod_{(u,v) in rho}
          sigma_inv[i_u, i_v]

with q = T - n - 1 is exact when B is (a multiple of) the identity and is
an asymptotic approximation for general weighting matrices: the left side
depends on the whole spectrum of B while the right side sees only trace
powers of B^-, so no trace-linear expression can match it exactly at
finite size.  See the README for measured finite-size gaps.

All index tuples are 1-based entry labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .combinat import (
    coset_type,
    enumerate_pair_partitions,
    matching_delta,
    partitions_of,
)
from .errors import DimensionError, RegimeError, UnsupportedSizeError
from .estimators import WeightMatrix
from .sampling import CovarianceModel
from .weingarten import _product_class_matrix, wg_double, wg_single

_HAAR_MAX_ORDER = 3
_INV_MAX_ORDER = 2


def _check_indices(indices, k, n=None):
    idx = tuple(int(v) for v in indices)
    if len(idx) != 2 * k:
        raise DimensionError(f"expected {2 * k} indices, got {len(idx)}")
    if any(v < 1 for v in idx):
        raise DimensionError("indices are 1-based and must be positive")
    if n is not None and any(v > n for v in idx):
        raise DimensionError(f"index out of range 1..{n}: {idx}")
    return idx


@dataclass(frozen=True)
class MomentQuery:
    """Validated entry-moment query.

    ``j_indices`` is present for Haar entry moments and absent for
    inverted compound Wishart moments; the latter require n >= k and
    q = T - n - 1 >= 2k - 1, enforced at construction when T is given.
    """

    k: int
    i_indices: tuple[int, ...]
    n: int
    t: int | None = None
    j_indices: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "i_indices", tuple(self.i_indices))
        if self.j_indices is not None:
            object.__setattr__(self, "j_indices", tuple(self.j_indices))
        _check_indices(self.i_indices, self.k, self.n)
        if self.j_indices is not None:
            _check_indices(self.j_indices, self.k, self.n)
        elif self.t is not None:
            if self.n < self.k:
                raise RegimeError(f"need n >= {self.k}, got n = {self.n}")
            if self.q < 2 * self.k - 1:
                raise RegimeError(
                    f"need q = T - n - 1 >= {2 * self.k - 1}, got q = {self.q}"
                )

    @property
    def q(self) -> int | None:
        return None if self.t is None else self.t - self.n - 1


def evaluate_moment_query(query: MomentQuery, model=None, weight=None) -> float:
    """Dispatch a query to the Haar or inverse compound Wishart evaluator."""
    if query.j_indices is not None:
        return haar_moment(query.i_indices, query.j_indices, query.n, query.k)
    return inv_wishart_moment_general(query.i_indices, model, weight, query.k)


def haar_moment(i_indices, j_indices, n: int, k: int) -> float:
    """Mixed moment of Haar orthogonal matrix entries in dimension n."""
    if not 1 <= k <= _HAAR_MAX_ORDER:
        raise UnsupportedSizeError(f"Haar moments supported for k <= {_HAAR_MAX_ORDER}")
    i_idx = _check_indices(i_indices, k, n)
    j_idx = _check_indices(j_indices, k, n)
    matchings = enumerate_pair_partitions(k)
    di = np.array([matching_delta(m, i_idx) for m in matchings])
    dj = np.array([matching_delta(m, j_idx) for m in matchings])
    if not di.any() or not dj.any():
        return 0.0
    table = wg_single(k, float(n))
    parts = partitions_of(k)
    class_values = np.array([table.values[p] for p in parts])
    wg_matrix = class_values[_product_class_matrix(k)]
    return float(di @ wg_matrix @ dj)


def _regime(model: CovarianceModel, weight: WeightMatrix, k: int) -> int:
    q = weight.t - model.n - 1
    if model.n < k:
        raise RegimeError(f"need n >= {k}, got n = {model.n}")
    if q < 2 * k - 1:
        raise RegimeError(f"need q = T - n - 1 >= {2 * k - 1}, got q = {q}")
    return q


def inv_wishart_mean(i: int, j: int, model: CovarianceModel, weight: WeightMatrix) -> float:
    """First inverse moment: Tr(B^-) sigma_inv[i, j] / (T q)."""
    q = _regime(model, weight, 1)
    return weight.tr_b_pinv * model.sigma_inv[i - 1, j - 1] / (weight.t * q)


def inv_wishart_second_moment(i1, i2, i3, i4, model: CovarianceModel,
                              weight: WeightMatrix) -> float:
    """Second inverse moment E[w^(-1)_{i1 i2} w^(-1)_{i3 i4}] (needs q > 2)."""
    t = weight.t
    q = t - model.n - 1
    if q <= 2:
        raise RegimeError(f"second moment needs q > 2, got q = {q}")
    if model.n < 2:
        raise RegimeError("second moment needs n >= 2")
    s = model.sigma_inv
    p12 = s[i1 - 1, i2 - 1] * s[i3 - 1, i4 - 1]
    p13 = s[i1 - 1, i3 - 1] * s[i2 - 1, i4 - 1]
    p14 = s[i1 - 1, i4 - 1] * s[i2 - 1, i3 - 1]
    term_sq = ((t + 1) * (q - 1) - 2) * p12 + (t - q + 1) * (p13 + p14)
    term_pw = 2 * (t - q + 1) * p12 + (t * q - 2) * (p13 + p14)
    denom = t * (t + 2) * (t - 1) * q * (q - 2) * (q + 1)
    return (weight.tr_b_pinv**2 * term_sq + weight.tr_b_pinv_sq * term_pw) / denom


def inv_wishart_moment_general(i_indices, model: CovarianceModel,
                               weight: WeightMatrix, k: int) -> float:
    """Literal double sum over matchings; the oracle for the closed forms."""
    if not 1 <= k <= _INV_MAX_ORDER:
        raise UnsupportedSizeError(
            f"general inverse moments supported for k <= {_INV_MAX_ORDER}"
        )
    idx = _check_indices(i_indices, k, model.n)
    q = _regime(model, weight, k)
    matchings = enumerate_pair_partitions(k)
    parts = partitions_of(k)

    # Tr_sigma(B^-) is a product of pseudo-inverse power traces over the
    # coset-type parts; at k <= 2 only the cached first two powers occur.
    pinv_power_traces = {1: weight.tr_b_pinv, 2: weight.tr_b_pinv_sq}
    match_class = [
        parts.index(coset_type(m.as_permutation()).parts) for m in matchings
    ]
    sigma_traces = np.array(
        [np.prod([pinv_power_traces[part] for part in parts[c]]) for c in match_class]
    )

    table = wg_double(k, float(weight.t), float(-q))
    wg_classes = np.array([table.values[p] for p in parts])
    class_matrix = _product_class_matrix(k)

    s = model.sigma_inv
    rho_products = np.array(
        [
            np.prod([s[idx[a - 1] - 1, idx[b - 1] - 1] for a, b in m.pairs])
            for m in matchings
        ]
    )
    total = sigma_traces @ wg_classes[class_matrix] @ rho_products
    return float((-1) ** k * total)
