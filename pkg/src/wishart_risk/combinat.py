"""Permutations of [2k], pair partitions, and coset-type combinatorics.

A permutation sigma of {1, ..., 2k} carries an undirected multigraph on the
2k points whose edges are the fixed pairs {2i-1, 2i} together with the
image pairs {sigma(2i-1), sigma(2i)}.  Every vertex has degree two, so the
connected components have even sizes 2*eta_1 >= 2*eta_2 >= ...; the
partition (eta_1, eta_2, ...) of k is the coset-type of sigma and its
length is written kappa(sigma).  Pair partitions (perfect matchings) embed
into the symmetric group through their canonical ordering, which makes the
coset-type machinery available for them as well.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, UnsupportedSizeError

# (2k-1)!! grows fast; 945 matchings at k=5 is the largest Gram matrix we
# ever build, and nothing in the closed forms needs more than k=3.
MAX_PAIRING_ORDER = 5


@dataclass(frozen=True)
class Perm2k:
    """Permutation of {1, ..., 2k} in one-line form: images[i-1] = sigma(i)."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(v) for v in self.images)
        object.__setattr__(self, "images", images)
        if len(images) % 2 != 0 or not images:
            raise DimensionError(
                f"one-line form must have even positive length, got {len(images)}"
            )
        if sorted(images) != list(range(1, len(images) + 1)):
            raise DimensionError(f"not a bijection of 1..{len(images)}: {images}")

    @property
    def k(self) -> int:
        return len(self.images) // 2

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def compose(self, other: "Perm2k") -> "Perm2k":
        """Composition (self * other)(x) = self(other(x))."""
        if self.size != other.size:
            raise DimensionError("cannot compose permutations of different sizes")
        return Perm2k(tuple(self.images[j - 1] for j in other.images))

    __mul__ = compose

    def inverse(self) -> "Perm2k":
        inv = [0] * self.size
        for i, v in enumerate(self.images, start=1):
            inv[v - 1] = i
        return Perm2k(tuple(inv))

    @classmethod
    def identity(cls, k: int) -> "Perm2k":
        return cls(tuple(range(1, 2 * k + 1)))


@dataclass(frozen=True)
class PairPartition:
    """Perfect matching of {1, ..., 2k}, stored in canonical order.

    Canonical order: within each pair the smaller element comes first and
    pairs are sorted by their smaller element, so the flattened sequence
    p(1), p(2), ..., p(2k) satisfies p(1) < p(3) < ... < p(2k-1) and
    p(2i-1) < p(2i).  Construction canonicalizes, so re-canonicalizing an
    existing instance is a no-op.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        canon = tuple(sorted((min(a, b), max(a, b)) for a, b in self.pairs))
        object.__setattr__(self, "pairs", canon)
        flat = [x for pair in canon for x in pair]
        if sorted(flat) != list(range(1, len(flat) + 1)):
            raise DimensionError(f"pairs must partition 1..2k exactly once: {canon}")

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def canonical_form(self) -> tuple[int, ...]:
        return tuple(x for pair in self.pairs for x in pair)

    def as_permutation(self) -> Perm2k:
        """Embed into S_{2k}: the permutation sending i to the i-th element
        of the canonical form."""
        return Perm2k(self.canonical_form)


@dataclass(frozen=True)
class CosetType:
    """Weakly decreasing partition of k recording component half-sizes."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if any(p < 1 for p in parts):
            raise DimensionError(f"coset-type parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise DimensionError(f"coset-type parts must be weakly decreasing: {parts}")

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def k(self) -> int:
        return sum(self.parts)


def double_factorial_odd(k: int) -> int:
    """(2k-1)!! = number of perfect matchings of 2k points."""
    out = 1
    for m in range(1, 2 * k, 2):
        out *= m
    return out


@lru_cache(maxsize=None)
def enumerate_pair_partitions(k: int) -> tuple[PairPartition, ...]:
    """All (2k-1)!! pair partitions of {1, ..., 2k} in canonical order.

    The order is lexicographic on the canonical form, which keeps Gram
    matrix indexing stable across runs.
    """
    if not 1 <= k <= MAX_PAIRING_ORDER:
        raise UnsupportedSizeError(
            f"pair partition order k={k} outside supported range 1..{MAX_PAIRING_ORDER}"
        )

    def matchings(points):
        if not points:
            yield []
            return
        first = points[0]
        for idx in range(1, len(points)):
            partner = points[idx]
            rest = points[1:idx] + points[idx + 1 :]
            for tail in matchings(rest):
                yield [(first, partner)] + tail

    result = tuple(
        PairPartition(tuple(m)) for m in matchings(tuple(range(1, 2 * k + 1)))
    )
    assert len(result) == double_factorial_odd(k)
    return result


def coset_type(sigma: Perm2k) -> CosetType:
    """Coset-type of sigma: sorted component half-sizes of its graph.

    The graph has the fixed edges {2i-1, 2i} and the image edges
    {sigma(2i-1), sigma(2i)} kept as a multiset; component sizes are
    insensitive to edge multiplicity, so a union-find over the vertices
    suffices.
    """
    n = sigma.size
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for i in range(1, sigma.k + 1):
        union(2 * i - 1, 2 * i)
        union(sigma(2 * i - 1), sigma(2 * i))
    sizes = {}
    for v in range(1, n + 1):
        r = find(v)
        sizes[r] = sizes.get(r, 0) + 1
    halves = sorted((s // 2 for s in sizes.values()), reverse=True)
    return CosetType(tuple(halves))


def kappa(sigma: Perm2k) -> int:
    """Number of connected components of sigma's graph."""
    return coset_type(sigma).length


def delta_product(sigma: Perm2k, indices) -> int:
    """Product over s of the Kronecker deltas [i_{sigma(2s-1)} == i_{sigma(2s)}].

    ``indices`` is a 2k-tuple of positive integers, 1-indexed by position.
    """
    idx = tuple(indices)
    if len(idx) != sigma.size:
        raise DimensionError(
            f"expected {sigma.size} indices, got {len(idx)}"
        )
    for s in range(1, sigma.k + 1):
        if idx[sigma(2 * s - 1) - 1] != idx[sigma(2 * s) - 1]:
            return 0
    return 1


def matching_delta(partition: PairPartition, indices) -> int:
    """delta product of an embedded matching: 1 iff indices agree on each pair."""
    idx = tuple(indices)
    if len(idx) != 2 * partition.k:
        raise DimensionError(
            f"expected {2 * partition.k} indices, got {len(idx)}"
        )
    for a, b in partition.pairs:
        if idx[a - 1] != idx[b - 1]:
            return 0
    return 1


def power_trace(sigma: Perm2k, a) -> float:
    """Product over the coset-type parts eta_j of trace(A**eta_j)."""
    mat = np.asarray(a)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"power trace needs a square matrix, got shape {mat.shape}")
    out = 1.0
    for part in coset_type(sigma).parts:
        out *= np.trace(np.linalg.matrix_power(mat, part))
    return out


def is_hyperoctahedral(sigma: Perm2k) -> bool:
    """Membership in H_k, the stabilizer of the trivial matching.

    sigma is hyperoctahedral iff it maps every pair {2i-1, 2i} onto some
    pair {2j-1, 2j}; the subgroup has order 2**k * k!.
    """
    for i in range(1, sigma.k + 1):
        a, b = sigma(2 * i - 1), sigma(2 * i)
        if abs(a - b) != 1 or (min(a, b) % 2) != 1:
            return False
    return True


def hyperoctahedral_order(k: int) -> int:
    return 2**k * math.factorial(k)


@lru_cache(maxsize=None)
def partitions_of(k: int) -> tuple[tuple[int, ...], ...]:
    """All partitions of k, each weakly decreasing, in reverse-lex order."""

    def gen(remaining, cap):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    return tuple(gen(k, k))


@lru_cache(maxsize=None)
def coset_representatives(k: int) -> dict[tuple[int, ...], Perm2k]:
    """One embedded-matching representative per coset-type partition of k.

    Unions of the trivial matching with an arbitrary matching realize every
    even-cycle profile, so scanning the matchings covers all partitions.
    """
    reps = {}
    for partition in enumerate_pair_partitions(k):
        perm = partition.as_permutation()
        key = coset_type(perm).parts
        reps.setdefault(key, perm)
    missing = [p for p in partitions_of(k) if p not in reps]
    if missing:  # pragma: no cover - impossible for k <= MAX_PAIRING_ORDER
        raise UnsupportedSizeError(f"no matching representative for {missing}")
    return reps


def all_permutations(k: int):
    """Iterate over all of S_{2k} (test-scale helper; (2k)! elements)."""
    for images in itertools.permutations(range(1, 2 * k + 1)):
        yield Perm2k(images)
