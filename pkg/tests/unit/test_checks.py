import pytest

from hopfring.biv_algebra import HomClass
from hopfring.checks import (
    SeriesKit,
    annihilates_B,
    compare_cases,
    compare_series,
    compare_sign_forms,
    e_series,
    series_difference,
    steenrod_cartan_coproduct,
    transfer,
    verify_sigma_vanishing,
    verify_steenrod_duality,
    verify_string_bijection,
)
from hopfring.errors import StringError
from hopfring.invariants import IndexString
from hopfring.report import CheckStatus
from hopfring.series import TruncSeries


def series(terms, bound=6):
    return TruncSeries(('s', 't'), terms, bound, 3)


def test_series_difference_lists_mismatches_by_degree():
    a = series({(1, 0): 1, (0, 2): 1, (3, 0): 2})
    b = series({(1, 0): 1, (3, 0): 1})
    assert series_difference(a, b) == [(0, 2), (3, 0)]
    assert series_difference(a, a) == []


def test_series_difference_ignores_terms_beyond_the_smaller_bound():
    a = series({(1, 0): 1, (5, 0): 1}, bound=6)
    b = series({(1, 0): 1}, bound=4)
    assert series_difference(a, b) == []


def test_compare_series_reports_first_coefficient():
    result = compare_series('demo', series({(1, 1): 1}), series({(1, 1): 2, (0, 1): 1}))
    assert result.status == CheckStatus.FAIL
    assert result.counterexample['coefficient'] == [0, 1]
    assert result.counterexample['mismatches'] == 2
    assert compare_series('demo', series({(1, 1): 1}), series({(1, 1): 4})).ok


def test_compare_cases_stops_at_first_failure():
    cases = [({'i': 0}, 1, 1), ({'i': 1}, 2, 3), ({'i': 2}, 4, 5)]
    result = compare_cases('demo', cases)
    assert result.status == CheckStatus.FAIL
    assert result.counterexample == {'i': 1, 'lhs': '2', 'rhs': '3'}
    assert compare_cases('demo', []).ok


def test_compare_sign_forms_koszul_decides():
    agree = compare_sign_forms('demo', [({'x': 1}, 1, 1, 1)])
    assert agree.ok and not agree.notes

    noted = compare_sign_forms('demo', [({'x': 1}, 1, 1, -1), ({'x': 2}, 2, 2, -2)])
    assert noted.ok
    assert len(noted.notes) == 1 and '2 cases' in noted.notes[0]

    wrong = compare_sign_forms('demo', [({'x': 1}, 1, -1, 1)])
    assert wrong.status == CheckStatus.FAIL


def test_e_series_first_coefficients(ring):
    argument = TruncSeries.monomial(('s',), (1,), 1, 4, 3)
    e = e_series(ring, 0, argument, 4)
    assert e.coefficient((0,)) == ring.E(0, 0)
    assert e.coefficient((1,)) == ring.E(0, 1)
    assert e.coefficient((3,)) == ring.E(0, 3)


def test_series_kit_scalars(ring):
    kit = SeriesKit(ring, 6)
    assert kit.var('s').coeffs == {(1, 0): 1}
    assert kit.one().coeffs == {(0, 0): 1}
    assert kit.t_hat('t').coeffs == {(0, 1): 1, (0, 3): 2}


def test_annihilates_B_in_rank_one():
    # B_0[1] is spanned by e x (degree 3) and x^2 (degree 4) at p = 3
    assert annihilates_B(HomClass.v(1, 1, 3))
    assert not annihilates_B(HomClass.v(1, 1, 3, 2))
    assert not annihilates_B(HomClass.u(1, 1, 3) * HomClass.v(1, 1, 3))


def test_transfer_on_rank_one_monomials(ring):
    assert transfer(ring, HomClass.v(1, 1, 3, 2)) == ring.E(0, 1)
    assert transfer(ring, HomClass.v(1, 1, 3, 1)) == 0
    assert transfer(ring, HomClass.u(1, 1, 3)) == 0
    assert transfer(ring, HomClass.u(1, 1, 3) * HomClass.v(1, 1, 3)) == ring.E(1, 1)


def test_transfer_is_circle_product_over_variables(ring):
    h = HomClass.monomial([], (2, 4), 1, 2, 3)
    assert transfer(ring, h) == ring.circle(ring.E(0, 1), ring.E(0, 2))


def test_sigma_vanishing_precondition(ring):
    with pytest.raises(StringError):
        verify_sigma_vanishing(ring, 1, IndexString.of(0, 1))


def test_sigma_kills_E_at_low_index(ring):
    assert verify_sigma_vanishing(ring, 3, IndexString.of(0, 1))


def test_steenrod_duality_rank_one():
    assert verify_steenrod_duality(1, 12, 3).ok


def test_string_bijection_level_zero(ring):
    result = verify_string_bijection(ring, 0, 16, rank_max=2)
    assert result.ok, result.counterexample


def test_e_series_of_truncated_argument_is_constant(ring5):
    # s^4 + ... is cut off entirely at bound 3
    argument = TruncSeries(('s', 't'), {(4, 0): 1}, 3, 5)
    assert not argument.coeffs
    e = e_series(ring5, 0, argument, 3)
    assert set(e.coeffs) == {(0, 0)}
    assert e.coefficient((0, 0)) == ring5.E(0, 0)


def test_steenrod_cartan_coproduct_of_zero(ring):
    zero = ring.zero(0)
    expected = steenrod_cartan_coproduct(ring, zero, 0)
    assert expected == ring.coproduct(ring.steenrod_act(zero, 0, 0))
    assert not expected


@pytest.mark.parametrize('eps,i', [(0, 1), (1, 1), (0, 2)])
def test_steenrod_cartan_coproduct_at_k_zero(ring, eps, i):
    x = ring.E(eps, i)
    assert steenrod_cartan_coproduct(ring, x, 0) == ring.coproduct(x)
