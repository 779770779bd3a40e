"""Full-budget runs of the verification suites at p = 3, plus a p = 5 smoke run."""

import pytest

from hopfring.checks import (
    verify_action_formulas,
    verify_change_of_basis,
    verify_e_expansion,
    verify_e_relations,
    verify_excess_relation,
    verify_hopf_axioms,
    verify_nishida_migrate,
    verify_sigma_vanishing_range,
    verify_steenrod_duality,
    verify_steenrod_series,
    verify_string_bijection,
    verify_transfer,
    verify_worked_example,
)
from hopfring.config import RunConfig
from hopfring.hopf_ring import HopfRing
from hopfring.suites import (
    WORKED_EXAMPLE_DEGREE,
    dickson_mui_checks,
    random_words,
    run_suite,
    verify_adem_confluence,
    verify_coinvariant_duality,
    verify_leading_terms,
    verify_length_duality,
)


def assert_all_ok(results):
    bad = [(r.name, r.counterexample) for r in results if not r.ok]
    assert not bad, bad


@pytest.mark.parametrize('n', [1, 2, 3])
def test_dickson_mui_rank(n):
    assert_all_ok(dickson_mui_checks(n, 3))


def test_invariant_side_at_degree_30():
    assert_all_ok([
        verify_leading_terms('dickson', 3, 30, 3),
        verify_leading_terms('mui', 3, 30, 3),
        verify_coinvariant_duality(3, 30, 3),
    ])
    assert_all_ok(verify_length_duality(3, 4, 30, 3))


def test_adem_confluence_500_words():
    assert_all_ok(verify_adem_confluence(random_words(500, 3, 60, 3, seed=20240521), 3))


@pytest.mark.slow
def test_e_relations_trunc_12(ring):
    assert_all_ok(verify_e_relations(ring, 12))
    assert_all_ok([verify_excess_relation(ring, 2, 24)])


@pytest.mark.slow
@pytest.mark.parametrize('k', [0, 1, 2])
def test_expansion_and_bijection(ring, k):
    assert_all_ok([verify_e_expansion(ring, k, 30, 3), verify_string_bijection(ring, k, 30, 3)])


@pytest.mark.slow
def test_sigma_vanishing_up_to_level_4(ring):
    assert_all_ok([verify_sigma_vanishing_range(ring, 4, 24, 3)])


@pytest.mark.slow
@pytest.mark.parametrize('k', [0, 1, 2])
def test_change_of_basis(ring, k):
    assert_all_ok(verify_change_of_basis(ring, k, 24, 3))


@pytest.mark.slow
def test_action_formulas_trunc_10(ring):
    assert_all_ok(verify_action_formulas(ring, 10))


@pytest.mark.slow
@pytest.mark.parametrize('n', [1, 2])
def test_steenrod_series(ring, n):
    assert_all_ok(verify_steenrod_series(ring, n, 10))


@pytest.mark.slow
@pytest.mark.parametrize('n', [1, 2])
def test_nishida_and_transfer(ring, n):
    assert_all_ok([
        verify_transfer(ring, n, 24),
        verify_steenrod_duality(n, 24, 3),
        verify_nishida_migrate(ring, n, 24),
    ])


@pytest.mark.slow
def test_hopf_axioms(ring):
    assert_all_ok(verify_hopf_axioms(ring))


@pytest.mark.slow
def test_worked_example():
    assert_all_ok([verify_worked_example(HopfRing(3, WORKED_EXAMPLE_DEGREE + 12))])


@pytest.mark.slow
def test_smoke_at_p5(ring5):
    assert_all_ok(dickson_mui_checks(2, 5))
    assert_all_ok(verify_adem_confluence(random_words(100, 3, 80, 5, seed=5), 5))
    assert_all_ok(verify_e_relations(ring5, 6))
    assert_all_ok(verify_action_formulas(ring5, 6))
    assert_all_ok([verify_string_bijection(ring5, 0, 24, 2)])


def test_small_budget_runs_a_subset():
    config = RunConfig(suite='all', degree_max=4, rank_max=1, engine_degree_max=20).validate()
    config.suites['adem-confluence']['samples'] = 20
    config.suites['adem-confluence']['degree'] = 20
    report = run_suite(config)
    counts = report.counts()
    assert counts['skipped'] > 0
    assert counts['fail'] == 0
    assert report.exit_code() in (0, 3)
