import json

import pytest
import yaml

from hopfring.cli import EXIT_FAIL, EXIT_OVERFLOW, EXIT_PASS, EXIT_USAGE, basis_rows, build_parser, main
from hopfring.errors import StringError


@pytest.fixture
def run(settings_file, monkeypatch, capsys):
    for name in ('HOPFRING_PRIME', 'HOPFRING_DEGREE_MAX', 'HOPFRING_JOBS', 'HOPFRING_CONFIG'):
        monkeypatch.delenv(name, raising=False)

    def invoke(*argv):
        code = main(list(argv) + ['--config', str(settings_file)])
        return code, capsys.readouterr().out

    return invoke


def test_adem_reduce_text(run):
    code, out = run('adem-reduce', 'Q5 Q1')
    assert code == EXIT_PASS
    assert out.splitlines()[0] == '-Q4 Q2'
    assert 'degree: 24' in out


def test_adem_reduce_negative_excess_is_zero(run):
    code, out = run('adem-reduce', 'Q1 Q5')
    assert code == EXIT_PASS
    assert out.splitlines() == ['0', 'degree: 24']


def test_adem_reduce_json(run):
    code, out = run('adem-reduce', 'Q5 Q1', '--format', 'json')
    data = json.loads(out)
    assert code == EXIT_PASS
    assert data['degree'] == 24
    assert [t['coef'] % 3 for t in data['terms']] == [2]
    assert data['terms'][0]['string'] == [[0, 4], [0, 2]]


def test_adem_reduce_parse_error(run):
    code, out = run('adem-reduce', 'Q5 X1')
    assert code == EXIT_USAGE
    assert out == ''


def test_adem_reduce_bad_prime(run):
    code, _ = run('adem-reduce', 'Q1', '--prime', '9')
    assert code == EXIT_USAGE


def test_basis_R_json(run):
    code, out = run('basis', 'R', '--rank', '1', '--degree', '8', '--format', 'json')
    rows = json.loads(out)['rows']
    assert code == EXIT_PASS
    assert len(rows) == 9
    assert rows[3]['count'] == 1 and rows[4]['count'] == 1
    assert rows[5]['count'] == 0


def test_basis_cokernel_rank_one_is_empty(run):
    code, out = run('basis', 'cokernel', '--rank', '1', '--degree', '20')
    assert code == EXIT_PASS
    assert 'total: 0' in out


def test_basis_rows_validation():
    with pytest.raises(StringError):
        basis_rows('nope', 1, None, 4, 3)
    with pytest.raises(StringError):
        basis_rows('B', 0, None, 4, 3)


def test_verify_writes_report(run, tmp_path):
    out_file = tmp_path / 'report.json'
    code, _ = run('verify', '--suite', 'adem-confluence', '--format', 'json', '--out', str(out_file))
    data = json.loads(out_file.read_text())
    assert code == EXIT_PASS
    assert data['suite'] == 'adem-confluence'
    assert data['counts']['fail'] == 0


def test_verify_small_budget_skips(run):
    code, out = run('verify', '--suite', 'action-formulas', '--degree', '4')
    assert code == EXIT_PASS
    assert 'SKIPPED' in out


def test_verify_overflow_exit_code(tmp_path, capsys, monkeypatch):
    for name in ('HOPFRING_PRIME', 'HOPFRING_DEGREE_MAX', 'HOPFRING_JOBS'):
        monkeypatch.delenv(name, raising=False)
    settings = tmp_path / 'tiny.yaml'
    settings.write_text(yaml.safe_dump({'defaults': {'engine_degree_max': 10, 'degree_max': 16}}))
    code = main(['verify', '--suite', 'hopf-axioms', '--format', 'csv', '--config', str(settings)])
    out = capsys.readouterr().out
    assert code == EXIT_OVERFLOW
    assert 'hopf-axioms,overflow' in out


def test_parser_rejects_unknown_suite():
    with pytest.raises(SystemExit):
        build_parser().parse_args(['verify', '--suite', 'no-such-suite'])


def test_exit_code_constants():
    assert (EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_OVERFLOW) == (0, 1, 2, 3)


def test_verify_accepts_short_suite_name(run):
    code, out = run('verify', '--suite', 'prop47', '--degree', '4', '--format', 'json')
    data = json.loads(out)
    assert code == EXIT_PASS
    assert data['suite'] == 'e-relations'
    assert data['counts']['fail'] == 0
