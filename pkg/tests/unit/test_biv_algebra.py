import pytest

from hopfring.biv_algebra import (
    CohomClass,
    GLnMatrix,
    HomClass,
    cohom_basis,
    exact_divide,
    f_series,
    gl_act,
    hom_basis,
    monomial_basis,
    pair,
    steenrod_down,
    steenrod_up,
    underlined,
)
from hopfring.errors import DivisionError, RankMismatchError, SingularMatrixError

P = 3


def e(i, n=2):
    return CohomClass.e(i, n, P)


def x(i, n=2, power=1):
    return CohomClass.x(i, n, P, power)


def test_exterior_generators_anticommute():
    assert e(1) * e(1) == 0
    assert e(1) * e(2) == -(e(2) * e(1))


def test_divided_power_product():
    v = HomClass.v(1, 1, P)
    assert v * v == HomClass.v(1, 1, P, 2).scale(2)
    assert v * v * v == 0


def test_dual_monomials_pair_to_one():
    for c in cohom_basis(2, 5, P):
        for h in hom_basis(2, 5, P):
            assert pair(c, h) == (1 if c.terms.keys() == h.terms.keys() else 0)


def test_rank_mismatch():
    with pytest.raises(RankMismatchError):
        e(1, 1) + e(1, 2)


def test_reduced_power_and_bockstein():
    assert steenrod_up(0, 1, x(1)) == x(1, power=3)
    assert steenrod_up(1, 0, e(1)) == x(1)
    assert steenrod_up(0, 1, x(1) * x(2)) == x(1, power=3) * x(2) + x(1) * x(2, power=3)
    assert steenrod_up(0, 2, x(1)) == 0


@pytest.mark.parametrize('eps, k', [(0, 1), (1, 0), (1, 1), (0, 2)])
def test_steenrod_down_is_adjoint(eps, k):
    for d in range(0, 6):
        shift = 2 * k * (P - 1) + eps
        for c in cohom_basis(2, d, P):
            for h in hom_basis(2, d + shift, P):
                assert pair(steenrod_up(eps, k, c), h) == pair(c, steenrod_down(h, eps, k))


def test_gl_action_substitutes_linear_forms():
    T = GLnMatrix.T(2, P)
    assert gl_act(T, x(1)) == x(1)
    assert gl_act(T, x(2)) == x(1) + x(2)


def test_gl_action_preserves_pairing():
    for A in GLnMatrix.generators(2, P):
        for c in cohom_basis(2, 3, P):
            for h in hom_basis(2, 3, P):
                assert pair(gl_act(A, c), gl_act(A, h)) == pair(c, h)


def test_singular_matrix():
    with pytest.raises(SingularMatrixError):
        GLnMatrix(((1, 2), (2, 4)), P)


def test_exact_divide():
    g = x(1) + x(2)
    assert exact_divide(g * g * x(1), g) == g * x(1)
    with pytest.raises(DivisionError):
        exact_divide(x(1), x(2))


def test_json_round_trip():
    c = e(1) * x(2, power=4) - x(1, power=2)
    assert CohomClass.from_json(c.to_json()) == c


def test_monomial_basis_counts():
    # degree 2 in rank 2: e1 e2, x1, x2
    assert len(monomial_basis(2, 2)) == 3


def test_f_series():
    f1 = f_series(1, 1, 4, rank=1, prime=P)
    assert f1.coefficient((0,)) == 0
    assert f1.coefficient((3,)) == HomClass.u(1, 1, P) * HomClass.v(1, 1, P, 2)
    assert underlined(f1).coefficient((0,)) == HomClass.u(1, 1, P)
