from math import comb

import numpy as np
import pytest

from hopfring.errors import PrimeError, SingularMatrixError
from hopfring.fp_core import FpScalar, binom_mod_p, check_prime, fp_inverse, koszul_sign, sign
from hopfring.linalg import (
    as_matrix,
    det_mod_p,
    inverse_mod_p,
    is_unit_triangular,
    rank_mod_p,
    row_reduce,
    solve_in_span,
)


@pytest.mark.parametrize('p', [2, 4, 9, 1, -3])
def test_check_prime_rejects(p):
    with pytest.raises(PrimeError):
        check_prime(p)


@pytest.mark.parametrize('p', [3, 5, 7, 11])
def test_check_prime_accepts(p):
    assert check_prime(p) == p


def test_scalar_arithmetic():
    a, b = FpScalar(2, 3), FpScalar(5, 3)
    assert a + b == 1
    assert a * b == 1
    assert a - b == 0
    assert -a == 1
    assert a / FpScalar(2, 3) == 1
    assert int(FpScalar(-1, 5)) == 4
    assert FpScalar(4, 5).signed() == -1
    assert not FpScalar(3, 3)


def test_scalar_rejects_mixed_primes():
    with pytest.raises(PrimeError):
        FpScalar(1, 3) + FpScalar(1, 5)


def test_inverse():
    assert fp_inverse(2, 5) == 3
    with pytest.raises(ZeroDivisionError):
        fp_inverse(5, 5)


@pytest.mark.parametrize('p', [3, 5, 7])
def test_binom_matches_integer_binomial(p):
    for top in range(30):
        for bottom in range(top + 1):
            assert binom_mod_p(top, bottom, p) == comb(top, bottom) % p


@pytest.mark.parametrize('top, bottom', [(-1, 0), (-3, 2), (2, -1), (2, 5)])
def test_binom_out_of_range_is_zero(top, bottom):
    assert binom_mod_p(top, bottom, 3) == 0


def test_binom_zero_zero_is_one():
    assert binom_mod_p(0, 0, 5) == 1


def test_signs():
    assert sign(3) == -1 and sign(4) == 1
    assert koszul_sign(1, 1, 3) == 2
    assert koszul_sign(2, 1, 3) == 1


def test_row_reduce_and_rank():
    mat = as_matrix([[1, 2, 0], [2, 1, 0], [0, 0, 1]], 3)
    reduced, pivots = row_reduce(mat, 3)
    assert pivots == [0, 2]
    assert rank_mod_p(mat, 3) == 2
    assert rank_mod_p(as_matrix([], 3, 4), 3) == 0


def test_det_and_inverse():
    mat = as_matrix([[1, 2], [3, 4]], 5)
    assert det_mod_p(mat, 5) == (4 - 6) % 5
    inv = inverse_mod_p(mat, 5)
    assert np.array_equal((mat @ inv) % 5, np.eye(2, dtype=np.int64))
    with pytest.raises(SingularMatrixError):
        inverse_mod_p(as_matrix([[1, 2], [2, 4]], 5), 5)


def test_solve_in_span():
    rows = as_matrix([[1, 0, 1], [0, 1, 1]], 3)
    c = solve_in_span(rows, np.array([2, 1, 0]), 3)
    assert c is not None
    assert np.array_equal((c @ rows) % 3, np.array([2, 1, 0]))
    assert solve_in_span(rows, np.array([0, 0, 1]), 3) is None


def test_unit_triangular():
    assert is_unit_triangular(as_matrix([[1, 0], [2, 2]], 3), 3)
    assert not is_unit_triangular(as_matrix([[1, 1], [0, 1]], 3), 3)
    assert not is_unit_triangular(as_matrix([[1, 0], [1, 0]], 3), 3)
