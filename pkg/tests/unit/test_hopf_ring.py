import pytest

from hopfring.dyer_lashof import DLString
from hopfring.errors import HopfRingError, StringError, TruncationOverflow
from hopfring.hopf_ring import HopfElement, HopfRing, is_generator_word
from hopfring.invariants import IndexString


def test_components_add_under_star(ring):
    assert ring.star(ring.component(1), ring.component(2)) == ring.component(3)
    assert ring.star_power(ring.component(2), 3) == ring.component(6)


def test_E00_is_component_p(ring):
    assert ring.E(0, 0) == ring.component(3)


def test_E_below_epsilon_is_zero(ring):
    assert ring.E(1, 0) == 0


def test_E_rejects_bad_epsilon(ring):
    with pytest.raises(HopfRingError):
        ring.E(2, 1)


def test_bockstein_of_E(ring):
    assert ring.bockstein(ring.E(0, 1)) == ring.E(1, 1)
    assert ring.bockstein(ring.E(1, 2)) == 0


def test_one_is_the_circle_unit(ring):
    x = ring.E(0, 2)
    assert ring.circle(ring.component(1), x) == x
    assert ring.circle(x, ring.component(1)) == x


def test_zero_component_circle(ring):
    assert ring.circle(ring.component(0), ring.E(0, 1)) == ring.unit(0).scale(ring.E(0, 1).augmentation())


def test_sigma_kills_component_p(ring):
    assert ring.circle(ring.sigma(1), ring.E(0, 0)) == 0


def test_component_coproduct_is_grouplike(ring):
    two = ring.component(2)
    assert ring.coproduct(two) == ring.tensor(two, two)
    assert ring.counit(two) == 1


def test_sigma_is_primitive(ring):
    s = ring.sigma(2)
    one = ring.unit(2)
    assert ring.coproduct(s) == ring.tensor(s, one) + ring.tensor(one, s)


def test_antipode_on_components(ring):
    assert ring.antipode(ring.component(2)) == ring.component(-2)


def test_antipode_inverts_E(ring):
    x = ring.E(0, 1)
    total = ring.zero(0)
    for left, right, coef in ring.coproduct(x).factors():
        total = total + ring.star(ring.antipode(left), right).scale(coef)
    assert total == ring.unit(0).scale(ring.counit(x))


def test_steenrod_zero_is_identity(ring):
    x = ring.E(0, 3)
    assert ring.steenrod_act(x, 0, 0) == x
    assert ring.steenrod_act(ring.component(2), 0, 1) == 0


def test_overflow():
    small = HopfRing(3, 10)
    with pytest.raises(TruncationOverflow):
        small.circle(small.E(0, 2), small.E(0, 2))


def test_generator_words():
    assert is_generator_word(((0, 1),), 0, 3)
    assert not is_generator_word(((0, 1), (0, 5)), 0, 3)
    assert is_generator_word((), 1, 3)
    assert not is_generator_word((), 0, 3)


def test_json_round_trip(ring):
    x = ring.star(ring.E(0, 2), ring.E(1, 1))
    assert HopfElement.from_json(x.to_json(), 3) == x


def test_string_bijection_rank_one(ring):
    J = ring.string_bijection(0, IndexString.of(0, 1), 'forward')
    assert J == DLString.of(0, 1)
    assert ring.string_bijection(0, J, 'backward') == IndexString.of(0, 1)


def test_string_bijection_preconditions(ring):
    with pytest.raises(StringError):
        ring.string_bijection(4, IndexString.of(0, 1), 'forward')
    with pytest.raises(StringError):
        ring.string_bijection(0, IndexString.of(0, 1), 'sideways')


def test_worked_example_indices(ring):
    I = IndexString.of(0, 2, 1, 3, 1, 3)
    assert ring.j_indices(I) == ((0, 74), (1, 26), (1, 10))
    assert ring.predicted_sign(I) == -1
    assert ring.e_indices(I) == [(0, 4), (1, 20), (1, 86)]


def test_e_product_with_index_below_epsilon(ring):
    assert ring.e_product(((1, 0), (0, 2))) == 0


def test_expand_rank_one(ring):
    expansion = ring.expand_E_product(0, IndexString.of(0, 2))
    assert expansion.leading_matches
    assert not expansion.residual_violations()


def test_cache_sizes_and_clear():
    fresh = HopfRing(3, 30)
    fresh.circle(fresh.E(0, 1), fresh.E(0, 1))
    assert sum(fresh.cache_sizes().values()) > 0
    fresh.clear_caches()
    assert sum(fresh.cache_sizes().values()) == 0
