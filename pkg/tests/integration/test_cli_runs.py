"""End-to-end runs of `python -m hopfring`."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]


def hopfring(*argv, env_extra=None):
    env = {'PATH': '/usr/bin:/bin', 'PYTHONPATH': str(ROOT)}
    env.update(env_extra or {})
    return subprocess.run([sys.executable, '-m', 'hopfring', *argv],
                          capture_output=True, text=True, cwd=ROOT, env=env, timeout=600)


def test_adem_reduce_module_entry_point():
    proc = hopfring('adem-reduce', 'Q5 Q1')
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.splitlines()[0] == '-Q4 Q2'


def test_admissible_word_of_negative_excess_reduces_to_zero():
    proc = hopfring('adem-reduce', 'Q1 Q5')
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == '0'


def test_usage_error_exit_code():
    proc = hopfring('adem-reduce', 'Q1 Q')
    assert proc.returncode == 2
    assert 'Parse error' in proc.stderr


def test_basis_csv():
    proc = hopfring('basis', 'invariants', '--rank', '2', '--degree', '12', '--format', 'csv')
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    assert lines[0] == 'kind,n,k,d,count,strings'
    assert len(lines) == 14


def test_verify_quick_profile(tmp_path):
    out = tmp_path / 'dm.json'
    proc = hopfring('verify', '--suite', 'dickson-mui', '--profile', 'quick', '--format', 'json', '--out', str(out))
    assert proc.returncode == 0, proc.stderr
    report = json.loads(out.read_text())
    assert report['config']['profile'] == 'quick'
    assert report['config']['rank_max'] == 2
    assert report['counts']['fail'] == 0


def test_environment_selects_prime():
    proc = hopfring('adem-reduce', 'Q1', '--format', 'json', env_extra={'HOPFRING_PRIME': '5'})
    assert proc.returncode == 0
    assert json.loads(proc.stdout)['prime'] == 5


@pytest.mark.slow
def test_verify_all_at_default_budget():
    proc = hopfring('verify', '--suite', 'all', '--jobs', '2')
    assert proc.returncode == 0, proc.stdout[-2000:]
    assert '0 failed' in proc.stdout
