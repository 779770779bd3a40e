"""Shared fixtures: the prime, small engines and a config from a temporary YAML file."""

import pytest
import yaml

from hopfring.config import load_config
from hopfring.hopf_ring import HopfRing


@pytest.fixture
def p():
    return 3


@pytest.fixture(scope="session")
def ring():
    """p = 3 engine, shared across tests; results are memoized."""
    return HopfRing(3, 60)


@pytest.fixture(scope="session")
def ring5():
    return HopfRing(5, 48)


@pytest.fixture
def settings_file(tmp_path):
    settings = {
        'defaults': {'prime': 3, 'rank_max': 2, 'degree_max': 12, 'engine_degree_max': 40, 'jobs': 1},
        'profiles': {
            'smoke-p5': {'prime': 5, 'degree_max': 16, 'suites': {'action-formulas': {'trunc': 6}}},
        },
        'suites': {'adem-confluence': {'samples': 40, 'degree': 40}},
    }
    path = tmp_path / "settings.yaml"
    path.write_text(yaml.safe_dump(settings))
    return path


@pytest.fixture
def config(settings_file, monkeypatch):
    for name in ('HOPFRING_PRIME', 'HOPFRING_DEGREE_MAX', 'HOPFRING_JOBS', 'HOPFRING_CONFIG'):
        monkeypatch.delenv(name, raising=False)
    return load_config(str(settings_file))
