import pytest

from hopfring.config import RunConfig
from hopfring.dyer_lashof import word_degree
from hopfring.errors import StringError, TruncationOverflow
from hopfring.report import CheckResult, CheckStatus
from hopfring.suites import (
    SUITE_ALIASES,
    SUITES,
    SuiteTask,
    build_suite,
    dickson_mui_checks,
    random_words,
    resolve_suite,
    run_suite,
    verify_adem_confluence,
    verify_coinvariant_duality,
    verify_leading_terms,
    verify_length_duality,
)


def test_task_below_its_degree_is_skipped():
    task = SuiteTask('big', lambda: [CheckResult.passed('big')], min_degree=20)
    [result] = task.execute(10)
    assert result.status == CheckStatus.SKIPPED
    assert 'degree_max >= 20' in result.notes[0]


def test_task_overflow_is_reported():
    def overflow():
        raise TruncationOverflow(70, 60, 'star')

    [result] = SuiteTask('deep', overflow).execute(30)
    assert result.status == CheckStatus.OVERFLOW


def test_task_records_elapsed():
    [result] = SuiteTask('quick', lambda: [CheckResult.passed('quick')]).execute(0)
    assert result.ok and result.elapsed >= 0


def test_unknown_suite(ring):
    with pytest.raises(StringError):
        build_suite('no-such-suite', RunConfig(), ring)


def test_all_covers_every_suite(ring):
    names = {task.name.split(':')[0] for task in build_suite('all', RunConfig(), ring)}
    assert names == set(SUITES) - {'all'}


def test_random_words_are_seeded():
    first = random_words(20, 3, 40, 3, seed=7)
    assert first == random_words(20, 3, 40, 3, seed=7)
    assert len(first) == 20
    assert all(0 < word_degree(w, 3) <= 40 for w in first)
    assert all(i >= e for w in first for e, i in w)


def test_adem_confluence_on_sample():
    results = verify_adem_confluence(random_words(60, 3, 40, 3, seed=1), 3)
    assert [r.name for r in results] == ['adem-confluence:schedules', 'adem-confluence:associativity']
    assert all(r.ok for r in results)


@pytest.mark.parametrize('n', [1, 2])
def test_dickson_mui_checks(n):
    results = dickson_mui_checks(n, 3)
    assert len(results) == 8
    assert all(r.ok for r in results), [r.counterexample for r in results if not r.ok]


@pytest.mark.parametrize('kind', ['dickson', 'mui'])
def test_leading_terms(kind):
    assert verify_leading_terms(kind, 2, 20, 3).ok


def test_coinvariant_duality_small():
    assert verify_coinvariant_duality(2, 20, 3).ok


def test_length_duality_small():
    results = verify_length_duality(2, 3, 24, 3)
    assert all(r.ok for r in results)


def test_run_suite_with_config(config, ring):
    config.suite = 'adem-confluence'
    report = run_suite(config, ring)
    assert report.exit_code() == 0
    assert report.config['suite'] == 'adem-confluence'
    assert report.peak_memory_mb > 0


def test_run_suite_keeps_task_order(config, ring):
    config.suite = 'dickson-mui'
    config.jobs = 3
    report = run_suite(config, ring)
    ranks = [check.name.rsplit('-n', 1)[1] for check in report.checks]
    assert ranks == sorted(ranks)


def test_dickson_mui_checks_rank_three_skips_determinant_cross_checks():
    names = [r.name for r in dickson_mui_checks(3, 3)]
    assert len(names) == 6
    assert 'dickson-mui:v-product-n3' in names
    assert not any('integer-brackets' in name or 'steenrod-closure' in name for name in names)


@pytest.mark.parametrize('alias,suite', [
    ('prop47', 'e-relations'),
    ('lemma31', 'dickson-leading-terms'),
    ('confluence', 'adem-confluence'),
    ('hopf-axioms', 'hopf-axioms'),
])
def test_resolve_suite(alias, suite):
    assert resolve_suite(alias) == suite


def test_aliases_point_at_suites():
    assert set(SUITE_ALIASES.values()) <= set(SUITES)


def test_build_suite_accepts_alias(ring):
    tasks = build_suite('confluence', RunConfig(), ring)
    assert tasks and all(task.name.startswith('adem-confluence') for task in tasks)


def test_run_suite_resolves_alias_from_config(config, ring):
    config.suite = 'confluence'
    report = run_suite(config, ring)
    assert report.suite == 'adem-confluence'
    assert report.config['suite'] == 'adem-confluence'
