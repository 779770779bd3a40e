import pytest

from hopfring.dyer_lashof import (
    DLElement,
    DLString,
    NishidaWord,
    adem_reduce,
    basis_R,
    clear_cache,
    dual_coproduct_E,
    format_word,
    may_decompose,
    nishida_migrate,
    parse_word,
    phi_relations,
    recompose,
    reduce_product,
    special_strings,
    word_is_admissible,
)
from hopfring.errors import ParseError, StringError
from hopfring.invariants import basis_B

P = 3


def test_degree_and_excess():
    s = DLString.of(0, 5, 0, 1)
    assert s.degree(P) == 24
    assert s.excess(P) == 10 - 4
    assert DLString.of(1, 2).degree(P) == 7
    assert not s.is_admissible(P)


def test_invalid_pair():
    with pytest.raises(StringError):
        DLString.of(1, 0)


def test_parse_and_format():
    assert parse_word("Q5 bQ4") == ((0, 5), (1, 4))
    assert format_word(((1, 4), (0, 2))) == "bQ4 Q2"


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_word("Q5 X1")
    assert info.value.position == 3


def test_adem_example():
    result = adem_reduce("Q5 Q1", P)
    assert result == DLElement({((0, 4), (0, 2)): -1}, P)
    assert str(result) == "-Q4 Q2"


def test_admissible_word_is_fixed():
    assert str(adem_reduce("Q1", P)) == "Q1"


def test_negative_excess_vanishes():
    assert word_is_admissible(((0, 1), (0, 5)), P)
    assert adem_reduce("Q1 Q5", P) == 0


@pytest.mark.parametrize('word', ["Q5 Q1", "bQ6 Q2", "Q7 bQ2", "Q9 Q2 Q1", "bQ10 Q3 bQ1", "Q12 Q4 Q1"])
def test_schedules_agree(word):
    clear_cache()
    assert adem_reduce(word, P, 'leftmost') == adem_reduce(word, P, 'rightmost')


def test_normal_form_is_admissible():
    for word, _ in adem_reduce("Q12 Q4 Q1", P):
        assert word_is_admissible(word, P)


def test_reduce_product_reassociates():
    a, b, c = (DLElement({(letter,): 1}, P) for letter in ((0, 6), (0, 3), (0, 1)))
    assert reduce_product(reduce_product(a, b), c) == reduce_product(a, reduce_product(b, c))


def test_unknown_strategy():
    with pytest.raises(Exception):
        adem_reduce("Q1", P, 'middle')


def test_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv('HOPFRING_CACHE_DIR', str(tmp_path))
    clear_cache()
    first = adem_reduce("Q7 Q2", P)
    assert list((tmp_path / 'adem').glob('*.json'))
    clear_cache()
    assert adem_reduce("Q7 Q2", P) == first


def test_rank_one_R_basis():
    assert basis_R(1, 0, 4, P) == [DLString.of(0, 1)]
    assert basis_R(1, 0, 3, P) == [DLString.of(1, 1)]
    assert basis_R(1, 0, 5, P) == []


@pytest.mark.parametrize('n', [1, 2])
def test_R_and_B_are_equinumerous(n):
    for k in range(5):
        for d in range(31):
            assert len(basis_R(n, k, d, P)) == len(basis_B(n, k, d, P)), (n, k, d)


def test_may_decomposition_round_trip():
    for d in range(1, 31):
        for s in basis_R(2, 0, d, P):
            t, e = may_decompose(s, P)
            assert recompose(t, e, 2, P) == s


def test_special_string_ranges():
    with pytest.raises(StringError):
        special_strings(2, 'K', (1, 1), P)
    with pytest.raises(StringError):
        special_strings(2, 'I', (2,), P)


@pytest.mark.parametrize('n', [1, 2, 3])
def test_phi_relations(n):
    for label, lhs, rhs in phi_relations(n, P):
        assert lhs == rhs, label


def test_trivial_nishida():
    assert nishida_migrate(NishidaWord(0, 0, ((0, 2),)), P) == {(((0, 2),), (0, 0)): 1}


def test_dual_coproduct_indices():
    assert len(dual_coproduct_E(0, 2)) == 3
    assert dual_coproduct_E(1, 1) == [((0, 0), (1, 1)), ((1, 1), (0, 0))]
