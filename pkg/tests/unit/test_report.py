import json

from hopfring.report import CheckResult, CheckStatus, PeakMemory, Report, timed


def make_report(*checks):
    report = Report(suite='demo', config={'prime': 3})
    report.extend(list(checks))
    return report


def test_result_factories():
    assert CheckResult.passed('a').status == CheckStatus.PASS
    assert CheckResult.skipped('a', 'budget').notes == ['budget']
    failed = CheckResult.from_bool('a', False)
    assert failed.status == CheckStatus.FAIL
    assert failed.counterexample == {'name': 'a'}
    assert CheckResult.from_bool('a', True).ok


def test_skipped_counts_as_ok_but_overflow_does_not():
    assert CheckResult.skipped('a', 'x').ok
    assert not CheckResult('a', CheckStatus.OVERFLOW).ok


def test_counts_and_exit_codes():
    assert make_report(CheckResult.passed('a')).exit_code() == 0
    overflow = CheckResult('b', CheckStatus.OVERFLOW, notes=['degree 61 > 60'])
    assert make_report(CheckResult.passed('a'), overflow).exit_code() == 3
    report = make_report(overflow, CheckResult.failed('c', {'x': 1}), CheckResult.skipped('d', 'x'))
    assert report.exit_code() == 1
    assert report.counts() == {'pass': 0, 'fail': 1, 'skipped': 1, 'overflow': 1}
    assert not report.passed


def test_json_output():
    report = make_report(CheckResult.passed('a', ['alternative sign form differs']),
                         CheckResult.failed('b', {'lhs': '1', 'rhs': '2'}))
    data = json.loads(report.to_json())
    assert data['suite'] == 'demo'
    assert data['config'] == {'prime': 3}
    assert [c['status'] for c in data['checks']] == ['pass', 'fail']
    assert data['checks'][1]['counterexample'] == {'lhs': '1', 'rhs': '2'}


def test_csv_output():
    report = make_report(CheckResult.passed('a', ['n1', 'n2']))
    header, row = report.to_csv().strip().splitlines()
    assert header.startswith('suite,check,status')
    assert row.startswith('demo,a,pass')
    assert row.endswith('n1 | n2')


def test_text_output():
    text = make_report(CheckResult.failed('b', {'x': 1})).render('text')
    assert 'FAIL' in text
    assert 'counterexample: {"x": 1}' in text
    assert '0 passed, 1 failed' in text


def test_peak_memory_is_positive():
    memory = PeakMemory()
    memory.sample()
    assert memory.peak > 0
    assert memory.peak_mb > 0


def test_timed():
    result, elapsed = timed(sum, [1, 2, 3])
    assert result == 6
    assert elapsed >= 0
