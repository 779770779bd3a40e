import pytest

from hopfring.errors import DivisionError, HopfRingError
from hopfring.series import TruncSeries


def one_plus(var, bound, p=3):
    return TruncSeries((var,), {(0,): 1, (1,): 1}, bound, p)


def test_frobenius_power():
    assert one_plus('x', 10).power(3) == TruncSeries(('x',), {(0,): 1, (3,): 1}, 10, 3)


def test_truncation_drops_high_terms():
    series = one_plus('x', 4).power(5, bound=4)
    assert all(sum(e) <= 4 for e in series.coeffs)
    assert series.coefficient((2,)) == 10 % 3


def test_t_hat():
    t = TruncSeries.t_hat('s', 3, 10)
    assert t.coeffs == {(1,): 1, (3,): 2, (9,): 1}


def test_substitute_sum_of_variables():
    x_squared = TruncSeries.monomial(('x',), (2,), 1, 6, 3)
    s_plus_t = TruncSeries(('s', 't'), {(1, 0): 1, (0, 1): 1}, 6, 3)
    result = x_squared.substitute('x', s_plus_t)
    assert result.variables == ('s', 't')
    assert result.coeffs == {(2, 0): 1, (1, 1): 2, (0, 2): 1}


def test_substitute_rejects_constant_term():
    with pytest.raises(HopfRingError):
        one_plus('x', 4).substitute('x', one_plus('y', 4))


def test_addition_aligns_variables():
    a = TruncSeries.monomial(('s',), (1,), 1, 5, 3)
    b = TruncSeries.monomial(('t',), (2,), 2, 5, 3)
    total = a + b
    assert total.variables == ('s', 't')
    assert total.coefficient((1, 0)) == 1 and total.coefficient((0, 2)) == 2


def test_equality_uses_the_smaller_bound():
    a = TruncSeries(('x',), {(1,): 1, (5,): 1}, 6, 3)
    b = TruncSeries(('x',), {(1,): 1}, 4, 3)
    assert a == b


def test_shift():
    a = TruncSeries.monomial(('x',), (2,), 1, 5, 3)
    assert a.shift('x', -2).coeffs == {(0,): 1}
    with pytest.raises(DivisionError):
        a.shift('x', -3)


def test_mul_with_custom_coefficient_product():
    a = TruncSeries(('x',), {(0,): 'a', (1,): 'b'}, 3, 3)
    pairs = a.mul(a, coef_mul=lambda u, v: u + v)
    assert pairs.coefficient((0,)) == 'aa'
    assert pairs.coefficient((1,)) == 'abba'
