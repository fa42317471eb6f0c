"""
Exact abelian group arithmetic: Smith normal form, cokernels, coefficient
functors, direct doubles, power embeddings and quotient enumeration.
Brute-force element enumeration in tests.helpers is the reference.
"""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from sympy import Matrix

from grs.exceptions import CapExceededError, InfiniteGroupError, InvalidParameterError, NotPrimeError
from grs.models.algebra import FgAbelianGroup, IntMatrix
from grs.services.abelian_service import (
    embeds_power,
    enumerate_quotients,
    ext1_torsion,
    group_from_presentation,
    group_from_relations,
    hom_ext_Zp,
    is_direct_double,
    order,
    smith_normal_form,
    tensor_Zp,
    tensor_Zpk_order,
)
from tests.helpers import (
    direct_double_by_halves,
    finite_groups,
    group_signature,
    hom_count,
    power_embeds,
    quotient_signatures,
    zp_dimension,
)


def G(*factors, rank=0):
    return FgAbelianGroup.from_cyclic_orders([0] * rank + list(factors))


def _random_matrix(rng, rows, cols, bound=9):
    return IntMatrix.from_rows(rng.integers(-bound, bound + 1, size=(rows, cols)).tolist(), cols=cols)


def _random_unimodular(rng, n):
    a = np.eye(n, dtype=object)
    for _ in range(2 * n):
        i, j = (int(v) for v in rng.integers(0, n, size=2))
        move = int(rng.integers(0, 3))
        if move == 0 and i != j:
            a[i] = a[i] + int(rng.integers(-2, 3)) * a[j]
        elif move == 1:
            a[[i, j]] = a[[j, i]]
        else:
            a[i] = -a[i]
    return IntMatrix.from_array(a)


def _is_unimodular(m: IntMatrix) -> bool:
    if m.rows == 0:
        return True
    return abs(Matrix([list(r) for r in m.entries]).det()) == 1


def _check_form(m: IntMatrix):
    U, D, V = smith_normal_form(m)
    assert U @ m @ V == D
    assert D.is_diagonal()
    assert _is_unimodular(U) and _is_unimodular(V)
    diag = D.diagonal_entries()
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) or (a != 0 and b % a == 0)
    return D


class TestSmithNormalForm:

    def test_identity(self):
        assert smith_normal_form(IntMatrix.identity(3)).D == IntMatrix.identity(3)

    def test_coprime_diagonal(self):
        D = _check_form(IntMatrix.from_rows([[2, 0], [0, 3]]))
        assert D.diagonal_entries() == [1, 6]

    def test_square_example(self):
        D = _check_form(IntMatrix.from_rows([[2, 4], [6, 8]]))
        assert D.diagonal_entries() == [2, 4]

    def test_rectangular_and_zero(self):
        assert _check_form(IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12]])).diagonal_entries() == [2, 6]
        assert _check_form(IntMatrix.zeros(2, 3)) == IntMatrix.zeros(2, 3)

    def test_empty_matrix(self):
        U, D, V = smith_normal_form(IntMatrix.zeros(0, 2))
        assert (D.rows, D.cols) == (0, 2)
        assert V == IntMatrix.identity(2)

    @given(
        rows=st.integers(1, 4),
        cols=st.integers(1, 4),
        data=st.data(),
    )
    @settings(max_examples=100, suppress_health_check=[HealthCheck.too_slow])
    def test_random_small(self, rows, cols, data):
        entries = data.draw(st.lists(st.lists(st.integers(-12, 12), min_size=cols, max_size=cols), min_size=rows, max_size=rows))
        _check_form(IntMatrix.from_rows(entries, cols=cols))

    @pytest.mark.slow
    def test_thousand_random_matrices(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            rows, cols = (int(v) for v in rng.integers(1, 7, size=2))
            m = _random_matrix(rng, rows, cols)
            D = _check_form(m)
            P, Q = _random_unimodular(rng, rows), _random_unimodular(rng, cols)
            assert smith_normal_form(P @ m @ Q).D == D


class TestGroupFromRelations:

    def test_quaternion_abelianization(self):
        # 4a = 0, 2a - 2b = 0, 2a = 0
        rel = IntMatrix.from_rows([[4, 0], [2, -2], [2, 0]])
        assert group_from_relations(rel) == G(2, 2)

    def test_no_relations_is_free(self):
        assert group_from_relations(IntMatrix.zeros(0, 2)) == FgAbelianGroup(2)

    def test_perfect_group(self):
        assert group_from_relations(IntMatrix.from_rows([[-1, 2], [3, -5]])).is_trivial

    def test_presentation_helper(self):
        assert group_from_presentation(3, [[2, 0, 0], [0, 3, 0]]) == G(6, rank=1)

    @given(
        entries=st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4),
        k=st.integers(-3, 3),
        swap=st.booleans(),
    )
    @settings(max_examples=80, suppress_health_check=[HealthCheck.too_slow])
    def test_row_operations_do_not_change_the_group(self, entries, k, swap):
        base = group_from_relations(IntMatrix.from_rows(entries, cols=3))
        moved = [list(r) for r in entries]
        if len(moved) > 1:
            moved[0] = [a + k * b for a, b in zip(moved[0], moved[1])]
            if swap:
                moved[0], moved[1] = moved[1], moved[0]
        moved.append([k * v for v in entries[0]])
        assert group_from_relations(IntMatrix.from_rows(moved, cols=3)) == base


class TestFgAbelianGroup:

    def test_canonical_form(self):
        assert G(2, 3) == FgAbelianGroup.cyclic(6)
        assert G(4, 2).factors == (2, 4)
        assert G(12, 18).factors == (6, 36)
        assert FgAbelianGroup.cyclic(1).is_trivial
        assert FgAbelianGroup.cyclic(0) == FgAbelianGroup(1)

    def test_labels(self):
        assert str(G(2, 4, rank=2)) == "Z^2+Z2+Z4"
        assert str(FgAbelianGroup.trivial()) == "0"

    @pytest.mark.parametrize("rank, factors", [(-1, ()), (0, (1,)), (0, (4, 6))])
    def test_invalid(self, rank, factors):
        with pytest.raises(InvalidParameterError):
            FgAbelianGroup(rank, factors)

    def test_elementary_divisors(self):
        ed = G(2, 12).elementary_divisors()
        assert ed.primes() == [2, 3]
        assert ed.exponents(2) == [2, 1]
        assert ed.count_at_least(2, 2) == 1
        assert ed.to_group() == G(2, 12)

    def test_relation_matrix_presents_the_group(self):
        g = G(3, 9, rank=1)
        assert group_from_relations(g.relation_matrix()) == g

    def test_power_and_sum(self):
        assert G(2).power(3) == G(2, 2, 2)
        assert G(4).direct_sum(G(6)) == G(2, 12)
        assert G(5).power(0).is_trivial


class TestCoefficients:

    def test_tensor_examples(self):
        assert tensor_Zp(G(2, 4), 2) == 2
        assert tensor_Zp(G(2, 4), 3) == 0
        assert tensor_Zp(G(9, rank=1), 3) == 2
        assert tensor_Zpk_order(G(2, 8), 2, 2) == 8

    @pytest.mark.parametrize("p", [2, 3, 5, 7])
    def test_tensor_matches_enumeration(self, p):
        for g in finite_groups(64):
            assert tensor_Zp(g, p) == zp_dimension(g, p)

    def test_hom_ext_examples(self):
        assert hom_ext_Zp(G(2, 2), 2) == (2, 2)
        assert hom_ext_Zp(FgAbelianGroup(1), 2) == (1, 0)
        assert hom_ext_Zp(G(4, rank=1), 3) == (1, 0)

    @pytest.mark.parametrize("p", [2, 3])
    def test_hom_matches_enumeration(self, p):
        for g in finite_groups(48):
            hom_dim, _ = hom_ext_Zp(g, p)
            assert p ** hom_dim == hom_count(g, p)

    def test_ext_is_torsion(self):
        assert ext1_torsion(G(2, 4, rank=3)) == G(2, 4)
        assert ext1_torsion(FgAbelianGroup(2)).is_trivial

    def test_order(self):
        assert order(FgAbelianGroup.trivial()) == 1
        assert order(G(4, 2)) == 8
        assert order(G(2, rank=1)) is None

    @pytest.mark.parametrize("p", [0, 1, 4, 9])
    def test_not_prime(self, p):
        with pytest.raises(NotPrimeError) as exc:
            tensor_Zp(G(2), p)
        assert exc.value.code == "not-prime"

    def test_zpk_needs_finite(self):
        with pytest.raises(InfiniteGroupError):
            tensor_Zpk_order(FgAbelianGroup(1), 2, 1)


class TestDirectDouble:

    @pytest.mark.parametrize("group, expected, half", [
        (G(2, 2), True, G(2)),
        (G(4, 2), False, None),
        (G(4, 4), True, G(4)),
        (G(2, 4, 2, 4), True, G(2, 4)),
        (G(3, 9), False, None),
        (FgAbelianGroup.trivial(), True, FgAbelianGroup.trivial()),
        (FgAbelianGroup(2), True, FgAbelianGroup(1)),
        (FgAbelianGroup(1), False, None),
    ])
    def test_examples(self, group, expected, half):
        assert is_direct_double(group) == (expected, half)

    def test_matches_halving_search(self):
        groups = finite_groups(256)
        candidates = finite_groups(16)
        for g in groups:
            doubled, half = is_direct_double(g)
            assert doubled == direct_double_by_halves(g, candidates)
            if doubled:
                assert half.direct_sum(half) == g
                assert half.order() ** 2 == g.order()

    @given(factors=st.lists(st.integers(0, 30), max_size=4))
    @settings(max_examples=100, suppress_health_check=[HealthCheck.too_slow])
    def test_any_sum_with_itself_is_doubled(self, factors):
        a = FgAbelianGroup.from_cyclic_orders(factors)
        assert is_direct_double(a.direct_sum(a)) == (True, a)


class TestEmbedsPower:

    def test_examples(self):
        assert embeds_power(G(2), 2, G(2, 2))
        assert not embeds_power(G(2), 2, G(8))
        assert embeds_power(G(2), 1, G(8))
        assert embeds_power(G(4), 2, G(2, 8, 8))
        assert not embeds_power(G(4), 3, G(2, 8, 8))
        assert embeds_power(G(3), 5, FgAbelianGroup.trivial()) is False
        assert embeds_power(G(7), 0, FgAbelianGroup.trivial())

    def test_rejects_infinite_and_negative(self):
        with pytest.raises(InfiniteGroupError):
            embeds_power(FgAbelianGroup(1), 1, G(2))
        with pytest.raises(InfiniteGroupError):
            embeds_power(G(2), 1, FgAbelianGroup(1))
        with pytest.raises(InvalidParameterError):
            embeds_power(G(2), -1, G(2))

    @pytest.mark.slow
    def test_matches_subgroup_enumeration(self):
        ambients = finite_groups(64)
        pieces = [g for g in finite_groups(16) if not g.is_trivial]
        for b in ambients:
            for a in pieces:
                for count in (1, 2, 3):
                    if a.order() ** count > b.order():
                        break
                    assert embeds_power(a, count, b) == power_embeds(a, count, b), (a, count, b)


class TestEnumerateQuotients:

    def test_cyclic_four(self):
        assert enumerate_quotients(G(4)) == [FgAbelianGroup.trivial(), G(2), G(4)]

    def test_klein_four(self):
        assert enumerate_quotients(G(2, 2)) == [FgAbelianGroup.trivial(), G(2), G(2, 2)]

    def test_mixed_two_group(self):
        assert enumerate_quotients(G(4, 2)) == [FgAbelianGroup.trivial(), G(2), G(2, 2), G(4), G(2, 4)]

    def test_trivial(self):
        assert enumerate_quotients(FgAbelianGroup.trivial()) == [FgAbelianGroup.trivial()]

    def test_matches_enumeration(self):
        for g in finite_groups(64):
            found = enumerate_quotients(g)
            assert len(set(found)) == len(found)
            assert {group_signature(q) for q in found} == quotient_signatures(g), g

    def test_cap(self):
        with pytest.raises(CapExceededError) as exc:
            enumerate_quotients(G(4, 4), cap=8)
        assert exc.value.code == "cap-exceeded"
        assert len(enumerate_quotients(G(4, 4), cap=16)) == 6

    def test_infinite(self):
        with pytest.raises(InfiniteGroupError):
            enumerate_quotients(G(2, rank=1))
