from itertools import combinations

import pytest

from hopfring.biv_algebra import CohomClass
from hopfring.errors import StringError
from hopfring.invariants import (
    B_generators,
    IndexString,
    basis_B,
    basis_coinv_dual,
    basis_cokernel,
    basis_invariants,
    bracket_by_integer_determinant,
    check_division_agrees,
    degree_q,
    degree_R,
    dickson_q,
    expected_leading_term,
    in_span,
    integer_bracket_mismatches,
    invariant_monomial,
    leading_term,
    mui_product_relation,
    mui_R,
    steenrod_closure_failures,
    string_compare,
    string_degree,
    v_product,
    v_product_by_division,
    verify_gl_invariance,
)

P = 3


def test_rank_one_dickson_and_mui():
    x = CohomClass.x(1, 1, P)
    assert dickson_q(1, 0, P) == x ** (P - 1)
    assert dickson_q(1, 1, P) == 1
    assert mui_R(1, (0,), P) == CohomClass.e(1, 1, P) * x ** (P - 2)


@pytest.mark.parametrize('n', [1, 2, 3])
def test_recurrence_agrees_with_division(n):
    assert check_division_agrees(n, P)


@pytest.mark.parametrize('n, i', [(2, 0), (2, 1), (3, 0), (3, 2)])
def test_dickson_degrees(n, i):
    assert dickson_q(n, i, P).degree() == degree_q(n, i, P)


def test_mui_degrees():
    assert mui_R(2, (0,), P).degree() == degree_R(2, (0,), P)
    assert mui_R(2, (0, 1), P).degree() == degree_R(2, (0, 1), P)


@pytest.mark.parametrize('n', [2, 3])
def test_mui_R_squares_to_zero(n):
    for s in range(n):
        assert mui_R(n, (s,), P) ** 2 == 0


@pytest.mark.parametrize('n', [2, 3])
def test_mui_product_relation(n):
    for k in range(2, n + 1):
        for idx in combinations(range(n), k):
            lhs, rhs = mui_product_relation(n, idx, P)
            assert lhs == rhs


def test_mui_indices_must_ascend():
    with pytest.raises(StringError):
        mui_R(2, (1, 0), P)


def test_generators_are_invariant():
    for label, c in B_generators(2, P):
        assert verify_gl_invariance(2, c), label


def test_non_invariant_detected():
    assert not verify_gl_invariance(2, CohomClass.x(1, 2, P))


def test_index_string_validation():
    assert str(IndexString.of(1, -1, 0, 2)) == "(1,-1,0,2)"
    with pytest.raises(StringError):
        IndexString.of(0, 1, 0, -1)
    with pytest.raises(StringError):
        IndexString.of(2, 1)


def test_rank_one_invariant_basis():
    assert basis_invariants(1, 3, P) == [IndexString.of(1, 0)]
    assert basis_invariants(1, 4, P) == [IndexString.of(0, 1)]
    assert basis_invariants(1, 5, P) == []


@pytest.mark.parametrize('n', [1, 2, 3])
def test_string_degree_matches_polynomial(n):
    for d in range(1, 31):
        for I in basis_invariants(n, d, P):
            assert string_degree(I, P) == d
            assert invariant_monomial(I, P).degree() == d


def test_cokernel_empty_in_rank_one():
    assert all(not basis_cokernel(1, d, P) for d in range(40))


@pytest.mark.parametrize('n', [1, 2, 3])
def test_invariants_split_into_B_and_cokernel(n):
    for d in range(31):
        assert len(basis_invariants(n, d, P)) == len(basis_B(n, 0, d, P)) + len(basis_cokernel(n, d, P))


def test_leading_terms_up_to_sign():
    for d in range(1, 31):
        for I in basis_invariants(2, d, P):
            mono, coef = leading_term(invariant_monomial(I, P))
            expected, sgn = expected_leading_term(I, P)
            assert mono == expected, str(I)
            assert (coef - sgn) % P == 0 or (coef + sgn) % P == 0


def test_leading_terms_are_distinct():
    for d in range(1, 31):
        monos = [leading_term(invariant_monomial(I, P))[0] for I in basis_invariants(2, d, P)]
        assert len(monos) == len(set(monos))


def test_string_order():
    assert string_compare(IndexString.of(0, 1, 0, 0), IndexString.of(0, 0, 0, 1), P) == 1
    assert string_compare(IndexString.of(0, 1), IndexString.of(0, 1), P) == 0
    with pytest.raises(StringError):
        string_compare(IndexString.of(0, 1), IndexString.of(0, 1, 0, 0), P)


def test_coinvariant_duals_pair_with_their_monomials():
    for d in range(1, 25):
        strings = basis_invariants(2, d, P)
        duals = basis_coinv_dual(2, None, d, P)
        assert len(strings) == len(duals)


def test_steenrod_closure_of_generators():
    from hopfring.biv_algebra import steenrod_up
    from hopfring.invariants import B_span
    for label, g in B_generators(2, P):
        image = steenrod_up(0, 1, g)
        d = image.degree()
        if d is None:
            continue
        assert in_span(B_span(2, d, P), image), label


@pytest.mark.parametrize('n', [1, 2])
def test_brackets_agree_with_integer_determinants(n):
    assert integer_bracket_mismatches(n, P) == []


def test_integer_determinant_of_rank_one_brackets():
    assert bracket_by_integer_determinant(0, [1], P) == CohomClass.x(1, 1, P, power=3)
    assert bracket_by_integer_determinant(1, [], P) == CohomClass.e(1, 1, P)


@pytest.mark.parametrize('n', [1, 2, 3])
def test_v_product_is_quotient_of_consecutive_L(n):
    assert v_product_by_division(n, P) == v_product(n, P)


@pytest.mark.parametrize('n', [1, 2])
def test_steenrod_closure_of_B(n):
    assert steenrod_closure_failures(n, 24, P) == []


def test_in_span_of_nothing():
    assert not in_span([], CohomClass.x(1, 1, P))
    assert in_span([], CohomClass.zero(1, P))
