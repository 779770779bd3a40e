import logging

import pytest

from hopfring.config import DEFAULT_BUDGETS, RunConfig, load_config, merge_budgets
from hopfring.errors import HopfRingError


def test_defaults_from_settings_file(config):
    assert config.prime == 3
    assert config.rank_max == 2
    assert config.degree_max == 12
    assert config.engine_degree_max == 40
    assert config.budget('adem-confluence', 'samples') == 40
    # budgets absent from the file keep their built-in values
    assert config.budget('e-relations', 'trunc') == 12


def test_profile_overrides_defaults(settings_file, monkeypatch):
    monkeypatch.delenv('HOPFRING_PRIME', raising=False)
    config = load_config(str(settings_file), profile='smoke-p5')
    assert config.prime == 5
    assert config.degree_max == 16
    assert config.profile == 'smoke-p5'
    assert config.budget('action-formulas', 'trunc') == 6


def test_unknown_profile(settings_file):
    with pytest.raises(HopfRingError):
        load_config(str(settings_file), profile='nope')


def test_environment_beats_file(settings_file, monkeypatch):
    monkeypatch.setenv('HOPFRING_PRIME', '5')
    monkeypatch.setenv('HOPFRING_JOBS', '2')
    config = load_config(str(settings_file))
    assert config.prime == 5
    assert config.jobs == 2


def test_bad_environment_value(settings_file, monkeypatch):
    monkeypatch.setenv('HOPFRING_DEGREE_MAX', 'lots')
    with pytest.raises(HopfRingError):
        load_config(str(settings_file))


def test_overrides_beat_environment(settings_file, monkeypatch):
    monkeypatch.setenv('HOPFRING_PRIME', '5')
    config = load_config(str(settings_file), overrides={'prime': 7, 'format': None})
    assert config.prime == 7
    assert config.format == 'text'


def test_missing_file_falls_back(tmp_path, monkeypatch, caplog):
    monkeypatch.chdir(tmp_path)
    for name in ('HOPFRING_CONFIG', 'HOPFRING_PRIME', 'HOPFRING_DEGREE_MAX', 'HOPFRING_JOBS'):
        monkeypatch.delenv(name, raising=False)
    with caplog.at_level(logging.WARNING, logger='hopfring.config'):
        config = load_config(str(tmp_path / 'missing.yaml'))
    assert config.prime == RunConfig().prime
    assert 'No settings.yaml found' in caplog.text


@pytest.mark.parametrize('changes', [
    {'prime': 4},
    {'prime': 2},
    {'rank_max': 0},
    {'jobs': 0},
    {'format': 'xml'},
])
def test_validate_rejects(changes):
    with pytest.raises(HopfRingError):
        RunConfig(**changes).validate()


def test_dict_round_trip():
    config = RunConfig(prime=5, suite='adem-confluence')
    assert RunConfig.from_dict(config.to_dict()) == config


def test_merge_budgets_keeps_base():
    merged = merge_budgets(DEFAULT_BUDGETS, {'e-relations': {'trunc': 6}, 'extra': {'x': 1}})
    assert merged['e-relations'] == {'trunc': 6, 'levels': 2, 'degree': 24}
    assert merged['extra'] == {'x': 1}
    assert DEFAULT_BUDGETS['e-relations']['trunc'] == 12
