"""Tests for the pair-partition / coset-type layer."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wishart_risk.combinat import (
    MAX_PAIRING_ORDER,
    PairPartition,
    Perm2k,
    all_permutations,
    coset_representatives,
    coset_type,
    delta_product,
    double_factorial_odd,
    enumerate_pair_partitions,
    hyperoctahedral_order,
    is_hyperoctahedral,
    kappa,
    matching_delta,
    partitions_of,
    power_trace,
)
from wishart_risk.errors import DimensionError, UnsupportedSizeError


def brute_force_matchings(points):
    """Independent matching enumerator: filter unordered pair covers."""
    points = list(points)
    if not points:
        return [frozenset()]
    first = points[0]
    out = []
    for partner in points[1:]:
        rest = [p for p in points[1:] if p != partner]
        for tail in brute_force_matchings(rest):
            out.append(tail | {frozenset((first, partner))})
    return out


class TestEnumeration:
    def test_k1_single_pairing(self):
        assert [p.pairs for p in enumerate_pair_partitions(1)] == [((1, 2),)]

    def test_k2_all_three(self):
        got = [p.pairs for p in enumerate_pair_partitions(2)]
        assert got == [
            ((1, 2), (3, 4)),
            ((1, 3), (2, 4)),
            ((1, 4), (2, 3)),
        ]

    def test_k3_matches_brute_force(self):
        expected = {
            frozenset(frozenset(pair) for pair in m)
            for m in brute_force_matchings(range(1, 7))
        }
        got = {
            frozenset(frozenset(pair) for pair in p.pairs)
            for p in enumerate_pair_partitions(3)
        }
        assert len(expected) == 15
        assert got == expected

    @pytest.mark.parametrize("k", range(1, MAX_PAIRING_ORDER + 1))
    def test_double_factorial_count(self, k):
        assert len(enumerate_pair_partitions(k)) == double_factorial_odd(k)

    def test_out_of_range(self):
        with pytest.raises(UnsupportedSizeError):
            enumerate_pair_partitions(0)
        with pytest.raises(UnsupportedSizeError):
            enumerate_pair_partitions(MAX_PAIRING_ORDER + 1)

    def test_canonicalization_is_idempotent(self):
        scrambled = PairPartition(((6, 4), (2, 1), (5, 3)))
        assert scrambled.pairs == ((1, 2), (3, 5), (4, 6))
        again = PairPartition(scrambled.pairs)
        assert again.pairs == scrambled.pairs
        assert again.as_permutation() == scrambled.as_permutation()

    def test_bad_pairs_rejected(self):
        with pytest.raises(DimensionError):
            PairPartition(((1, 2), (2, 3)))


class TestPerm2k:
    def test_identity_and_call(self):
        e = Perm2k.identity(3)
        assert [e(i) for i in range(1, 7)] == list(range(1, 7))

    @settings(max_examples=50, deadline=None)
    @given(st.permutations(list(range(1, 7))), st.permutations(list(range(1, 7))),
           st.permutations(list(range(1, 7))))
    def test_group_axioms(self, a, b, c):
        pa, pb, pc = Perm2k(tuple(a)), Perm2k(tuple(b)), Perm2k(tuple(c))
        assert (pa * pb) * pc == pa * (pb * pc)
        assert pa * pa.inverse() == Perm2k.identity(3)
        assert pa.inverse() * pa == Perm2k.identity(3)
        assert pa * Perm2k.identity(3) == pa

    def test_not_a_bijection(self):
        with pytest.raises(DimensionError):
            Perm2k((1, 1, 2, 3))

    def test_odd_length(self):
        with pytest.raises(DimensionError):
            Perm2k((2, 1, 3))


class TestCosetType:
    def test_identity_s4(self):
        ct = coset_type(Perm2k.identity(2))
        assert ct.parts == (1, 1)
        assert kappa(Perm2k.identity(2)) == 2

    def test_worked_example_in_s8(self):
        sigma = Perm2k((2, 5, 4, 3, 1, 8, 7, 6))
        assert coset_type(sigma).parts == (3, 1)
        assert kappa(sigma) == 2

    def test_hyperoctahedral_elements_have_trivial_type(self):
        members = [p for p in all_permutations(2) if is_hyperoctahedral(p)]
        assert len(members) == 8
        for sigma in members:
            assert coset_type(sigma).parts == (1, 1)

    def test_biinvariance_under_h2(self):
        members = [p for p in all_permutations(2) if is_hyperoctahedral(p)]
        for sigma in all_permutations(2):
            expected = coset_type(sigma).parts
            for zeta in members:
                assert coset_type(zeta * sigma).parts == expected
                assert coset_type(sigma * zeta).parts == expected

    @pytest.mark.parametrize("k", [1, 2])
    def test_parts_sum_to_k(self, k):
        for sigma in all_permutations(k):
            ct = coset_type(sigma)
            assert sum(ct.parts) == k
            assert ct.length == len(ct.parts)

    def test_representatives_cover_all_partitions(self):
        for k in range(1, MAX_PAIRING_ORDER + 1):
            reps = coset_representatives(k)
            assert set(reps) == set(partitions_of(k))
            for parts, perm in reps.items():
                assert coset_type(perm).parts == parts


class TestDeltaProduct:
    def test_identity_equal_pair(self):
        assert delta_product(Perm2k.identity(1), (3, 3)) == 1

    def test_identity_unequal_pair(self):
        assert delta_product(Perm2k.identity(1), (3, 4)) == 0

    def test_crossing_matching(self):
        crossing = PairPartition(((1, 3), (2, 4)))
        assert delta_product(crossing.as_permutation(), (1, 2, 1, 2)) == 1
        assert matching_delta(crossing, (1, 2, 1, 2)) == 1
        assert delta_product(crossing.as_permutation(), (1, 2, 2, 1)) == 0

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            delta_product(Perm2k.identity(2), (1, 2, 3))

    def test_block_characterization(self):
        # delta is 1 exactly when indices are constant on each connected
        # block of the image pairs
        for sigma in all_permutations(2):
            pairs = [(sigma(1), sigma(2)), (sigma(3), sigma(4))]
            for idx in itertools.product((1, 2), repeat=4):
                blocks = {v: {v} for v in range(1, 5)}
                for a, b in pairs:
                    union = blocks[a] | blocks[b]
                    for v in union:
                        blocks[v] = union
                expected = int(
                    all(len({idx[v - 1] for v in block}) == 1
                        for block in blocks.values())
                )
                assert delta_product(sigma, idx) == expected


class TestPowerTrace:
    def test_worked_example_structure(self):
        sigma = Perm2k((2, 5, 4, 3, 1, 8, 7, 6))  # coset-type (3, 1)
        rng = np.random.default_rng(5)
        a = rng.standard_normal((4, 4))
        expected = np.trace(a @ a @ a) * np.trace(a)
        assert power_trace(sigma, a) == pytest.approx(expected, rel=1e-12)

    def test_identity_s2_on_eye(self):
        assert power_trace(Perm2k.identity(1), np.eye(7)) == pytest.approx(7.0)

    def test_identity_s4_on_diag(self):
        assert power_trace(Perm2k.identity(2), np.diag([1.0, 2.0])) == pytest.approx(9.0)

    def test_depends_only_on_coset_type(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((3, 3))
        by_type = {}
        for sigma in all_permutations(2):
            key = coset_type(sigma).parts
            value = power_trace(sigma, a)
            by_type.setdefault(key, value)
            assert value == pytest.approx(by_type[key], rel=1e-12)

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            power_trace(Perm2k.identity(1), np.ones((2, 3)))


class TestHyperoctahedral:
    def test_identity_is_member(self):
        assert is_hyperoctahedral(Perm2k.identity(2))

    def test_adjacent_transposition_is_member(self):
        assert is_hyperoctahedral(Perm2k((2, 1, 3, 4)))

    def test_member_count_in_s4(self):
        count = sum(is_hyperoctahedral(p) for p in all_permutations(2))
        assert count == hyperoctahedral_order(2) == 8

    def test_non_member(self):
        assert not is_hyperoctahedral(Perm2k((1, 3, 2, 4)))
