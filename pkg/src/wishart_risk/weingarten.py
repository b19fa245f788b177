"""Orthogonal Weingarten functions and the sharp convolution.

Functions on S_{2k} that are biinvariant under the hyperoctahedral group
H_k depend only on the coset-type, so they are stored as a map from
partitions of k to scalars.  On this space the sharp product

    (f1 # f2)(sigma) = sum over matchings tau of f1(sigma tau) f2(tau^{-1})

is a commutative product with identity the indicator of H_k.  The single
orthogonal Weingarten function Wg(.; z) is the element satisfying

    z^kappa # Wg # z^kappa = z^kappa      and
    Wg # z^kappa # Wg = Wg,

computed here by pseudo-inverting the Gram matrix G[s, t] =
z^kappa(sigma_s^{-1} sigma_t) over embedded matchings.  The double
Weingarten function Wg(.; z, w) is the sharp product of two singles.

For integer parameters at small k an exact rational path (Fraction
arithmetic end to end) pins closed-form coefficients bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from .combinat import (
    Perm2k,
    coset_representatives,
    coset_type,
    enumerate_pair_partitions,
    partitions_of,
)
from .errors import DimensionError, SingularParameterError

_GRAM_RTOL = 1e-12  # singular values below rtol * s_max count as zero
_TABLE_RTOL = 1e-9  # max spread allowed within one coset-type class


@dataclass(frozen=True)
class BiinvariantFn:
    """H_k-biinvariant function on S_{2k}: one value per partition of k."""

    k: int
    values: Mapping[tuple[int, ...], object]

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))
        missing = [p for p in partitions_of(self.k) if p not in self.values]
        if missing:
            raise DimensionError(f"missing coset-type values: {missing}")

    def __call__(self, sigma: Perm2k):
        if sigma.k != self.k:
            raise DimensionError(f"expected an element of S_{2 * self.k}")
        return self.values[coset_type(sigma).parts]


def indicator_hyperoctahedral(k: int) -> BiinvariantFn:
    """Identity element of the sharp product: 1 on H_k, 0 elsewhere.

    H_k membership is exactly coset-type (1, 1, ..., 1).
    """
    trivial = (1,) * k
    return BiinvariantFn(k, {p: 1 if p == trivial else 0 for p in partitions_of(k)})


def coset_power_function(k: int, z) -> BiinvariantFn:
    """The function sigma -> z ** kappa(sigma)."""
    return BiinvariantFn(k, {p: z ** len(p) for p in partitions_of(k)})


@lru_cache(maxsize=None)
def _matching_perms(k: int) -> tuple[Perm2k, ...]:
    return tuple(p.as_permutation() for p in enumerate_pair_partitions(k))


@lru_cache(maxsize=None)
def _product_class_matrix(k: int) -> np.ndarray:
    """Partition index of coset_type(sigma_s^{-1} sigma_t) for all matching pairs."""
    perms = _matching_perms(k)
    index = {p: i for i, p in enumerate(partitions_of(k))}
    m = len(perms)
    out = np.empty((m, m), dtype=np.int64)
    inverses = [p.inverse() for p in perms]
    for s in range(m):
        for t in range(m):
            out[s, t] = index[coset_type(inverses[s] * perms[t]).parts]
    return out


@lru_cache(maxsize=None)
def _convolution_class_table(k: int) -> dict[tuple[int, ...], tuple[tuple[int, int], ...]]:
    """For each partition p: pairs (class(rep_p * tau), class(tau^{-1})) over matchings."""
    perms = _matching_perms(k)
    reps = coset_representatives(k)
    index = {p: i for i, p in enumerate(partitions_of(k))}
    table = {}
    for p, rep in reps.items():
        entries = []
        for tau in perms:
            entries.append(
                (
                    index[coset_type(rep * tau).parts],
                    index[coset_type(tau.inverse()).parts],
                )
            )
        table[p] = tuple(entries)
    return table


def sharp_convolve(f1: BiinvariantFn, f2: BiinvariantFn) -> BiinvariantFn:
    """Sharp product of two biinvariant functions.

    The sum runs over the embedded pair partitions; the result is again
    biinvariant and the product is commutative.
    """
    if f1.k != f2.k:
        raise DimensionError(f"order mismatch: {f1.k} vs {f2.k}")
    k = f1.k
    parts = partitions_of(k)
    v1 = [f1.values[p] for p in parts]
    v2 = [f2.values[p] for p in parts]
    out = {}
    for p, entries in _convolution_class_table(k).items():
        acc = 0
        for left, right in entries:
            acc = acc + v1[left] * v2[right]
        out[p] = acc
    return BiinvariantFn(k, out)


@dataclass(frozen=True)
class WeingartenTable:
    """Weingarten values per coset-type for fixed order and parameter(s)."""

    k: int
    z: object
    w: object = None
    values: Mapping[tuple[int, ...], object] = field(default_factory=dict)
    exact: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def value(self, key):
        """Value at a coset-type partition or at a permutation."""
        if isinstance(key, Perm2k):
            key = coset_type(key).parts
        return self.values[tuple(key)]

    def as_biinvariant(self) -> BiinvariantFn:
        return BiinvariantFn(self.k, self.values)


def _exact_inverse(rows):
    """Gauss-Jordan inverse over the rationals; raises on singular input."""
    m = len(rows)
    aug = [list(r) + [Fraction(i == j) for j in range(m)] for i, r in enumerate(rows)]
    for col in range(m):
        pivot = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = Fraction(1) / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[m:] for row in aug]


def _assemble_table(k, z, class_matrix, inverse_entry, exact):
    """Group Gram-inverse entries by coset-type and check consistency."""
    values = {}
    for idx, partition in enumerate(partitions_of(k)):
        if exact:
            entries = [
                inverse_entry[s][t]
                for s in range(class_matrix.shape[0])
                for t in range(class_matrix.shape[1])
                if class_matrix[s, t] == idx
            ]
            first = entries[0]
            if any(e != first for e in entries):
                raise SingularParameterError(k, z, "inconsistent exact table")
            values[partition] = first
        else:
            entries = inverse_entry[class_matrix == idx]
            spread = np.ptp(entries)
            scale = max(np.max(np.abs(entries)), 1e-300)
            if spread > _TABLE_RTOL * scale:
                raise SingularParameterError(
                    k, z, f"coset-type {partition} entries spread {spread:.2e}"
                )
            values[partition] = float(np.mean(entries))
    return values


def _wg_single_float(k: int, z: float) -> WeingartenTable:
    class_matrix = _product_class_matrix(k)
    kap = np.array(
        [[len(partitions_of(k)[c]) for c in row] for row in class_matrix], dtype=float
    )
    gram = np.power(float(z), kap)
    u, s, vt = np.linalg.svd(gram)
    if s[-1] <= _GRAM_RTOL * s[0]:
        raise SingularParameterError(k, z, f"smallest singular value {s[-1]:.2e}")
    inv = (vt.T * (1.0 / s)) @ u.T
    values = _assemble_table(k, z, class_matrix, inv, exact=False)
    return WeingartenTable(k=k, z=z, values=values, exact=False)


def _wg_single_exact(k: int, z: int) -> WeingartenTable:
    class_matrix = _product_class_matrix(k)
    parts = partitions_of(k)
    zf = Fraction(z)
    rows = [
        [zf ** len(parts[class_matrix[s, t]]) for t in range(class_matrix.shape[1])]
        for s in range(class_matrix.shape[0])
    ]
    try:
        inv = _exact_inverse(rows)
    except ZeroDivisionError:
        raise SingularParameterError(k, z, "exactly singular Gram matrix") from None
    values = _assemble_table(k, z, class_matrix, inv, exact=True)
    return WeingartenTable(k=k, z=z, values=values, exact=True)


@lru_cache(maxsize=None)
def wg_single(k: int, z, exact: bool = False) -> WeingartenTable:
    """Single orthogonal Weingarten table at order k and parameter z.

    Built by pseudo-inverting the matching Gram matrix of z^kappa; entries
    with equal coset-type are verified to coincide before tabulation.
    Raises SingularParameterError when the Gram matrix is singular (z in a
    finite exceptional set, e.g. z=1 at k=2).
    """
    if exact:
        if not isinstance(z, (int, Fraction)):
            raise DimensionError("exact Weingarten tables need rational z")
        return _wg_single_exact(k, z)
    return _wg_single_float(k, float(z))


@lru_cache(maxsize=None)
def wg_double(k: int, z, w, exact: bool = False) -> WeingartenTable:
    """Double orthogonal Weingarten table: sharp product of two singles."""
    left = wg_single(k, z, exact=exact)
    right = wg_single(k, w, exact=exact)
    product = sharp_convolve(left.as_biinvariant(), right.as_biinvariant())
    return WeingartenTable(k=k, z=z, w=w, values=product.values, exact=exact)
