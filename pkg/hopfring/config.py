"""
Run Configuration
=================

Settings for verification runs, merged from (lowest to highest):
- built-in defaults
- `defaults:` in config/settings.yaml
- a named profile under `profiles:`
- HOPFRING_* environment variables (a .env file is honoured)
- command-line flags

The resolved RunConfig is embedded in every report.
"""

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional
import copy
import logging
import os

import yaml
from dotenv import load_dotenv

from .errors import HopfRingError
from .fp_core import check_prime

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv', 'text')

# Environment variable -> (RunConfig field, parser)
ENV_VARS = {
    'HOPFRING_PRIME': ('prime', int),
    'HOPFRING_DEGREE_MAX': ('degree_max', int),
    'HOPFRING_JOBS': ('jobs', int),
}

# Per-suite budgets used when settings.yaml is missing or silent
DEFAULT_BUDGETS: Dict[str, Dict[str, Any]] = {
    'length-duality': {'k_max': 4},
    'e-expansion': {'levels': [0, 1, 2]},
    'string-bijection': {'levels': [0, 1, 2]},
    'e-relations': {'trunc': 12, 'levels': 2, 'degree': 24},
    'sigma-vanishing': {'levels': 4, 'degree': 24},
    'change-of-basis': {'levels': [0, 1, 2], 'degree': 24},
    'action-formulas': {'trunc': 10},
    'steenrod-series': {'trunc': 10, 'ranks': [1, 2]},
    'adem-confluence': {'samples': 500, 'length': 3, 'degree': 60},
    'nishida-transfer': {'ranks': [1, 2], 'degree': 24},
    'hopf-axioms': {'degree': 16},
}


@dataclass
class RunConfig:
    """Everything a verification run depends on."""
    prime: int = 3
    rank_max: int = 3
    degree_max: int = 30
    engine_degree_max: int = 60
    jobs: int = 1
    seed: int = 20240521
    format: str = 'text'
    suite: str = 'all'
    output: Optional[str] = None
    profile: Optional[str] = None
    suites: Dict[str, Dict[str, Any]] = field(default_factory=lambda: copy.deepcopy(DEFAULT_BUDGETS))

    def validate(self) -> 'RunConfig':
        check_prime(self.prime)
        if self.rank_max < 1:
            raise HopfRingError(f"rank_max must be positive, got {self.rank_max}")
        if self.degree_max < 0 or self.engine_degree_max < 1:
            raise HopfRingError("degree budgets must be positive")
        if self.jobs < 1:
            raise HopfRingError(f"jobs must be at least 1, got {self.jobs}")
        if self.format not in FORMATS:
            raise HopfRingError(f"unknown format {self.format!r}; expected one of {FORMATS}")
        return self

    def budget(self, suite: str, key: str, default: Any = None) -> Any:
        return self.suites.get(suite, {}).get(key, default)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunConfig':
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in data.items() if k in known}
        if 'suites' in values:
            values['suites'] = merge_budgets(DEFAULT_BUDGETS, values['suites'] or {})
        return cls(**values)


def merge_budgets(base: Dict[str, Dict[str, Any]], extra: Dict[str, Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
    merged = copy.deepcopy(base)
    for suite, budget in (extra or {}).items():
        merged.setdefault(suite, {}).update(budget or {})
    return merged


def find_settings(config_path: Optional[str] = None) -> Optional[Path]:
    """First existing settings file among the candidate locations."""
    candidates = [config_path] if config_path else [
        os.getenv('HOPFRING_CONFIG'),
        Path.cwd() / 'config' / 'settings.yaml',
        Path(__file__).parent.parent / 'config' / 'settings.yaml',
    ]
    for path in candidates:
        if path and Path(path).exists():
            return Path(path)
    return None


def load_settings(config_path: Optional[str] = None) -> Dict[str, Any]:
    path = find_settings(config_path)
    if path is None:
        logger.warning("No settings.yaml found, using built-in defaults")
        return {}
    with open(path) as f:
        settings = yaml.safe_load(f) or {}
    logger.debug(f"Loaded settings from {path}")
    return settings


def _from_env() -> Dict[str, Any]:
    values = {}
    for name, (key, parse) in ENV_VARS.items():
        raw = os.getenv(name)
        if raw:
            try:
                values[key] = parse(raw)
            except ValueError:
                raise HopfRingError(f"{name}={raw!r} is not a valid {key}") from None
    return values


def load_config(config_path: Optional[str] = None, profile: Optional[str] = None,
                overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Resolve a RunConfig.

    Args:
        config_path: Explicit settings file; otherwise the candidate paths are searched
        profile: Name of a profile under `profiles:`
        overrides: Command-line values; None entries are ignored

    Raises:
        HopfRingError: unknown profile or an invalid value
    """
    load_dotenv()
    settings = load_settings(config_path)
    values: Dict[str, Any] = dict(settings.get('defaults') or {})
    budgets = merge_budgets(DEFAULT_BUDGETS, settings.get('suites') or {})

    if profile:
        profiles = settings.get('profiles') or {}
        if profile not in profiles:
            raise HopfRingError(f"unknown profile {profile!r}; known: {sorted(profiles)}")
        chosen = dict(profiles[profile] or {})
        budgets = merge_budgets(budgets, chosen.pop('suites', {}))
        values.update(chosen)
        values['profile'] = profile

    values.update(_from_env())
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values['suites'] = budgets

    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        logger.warning(f"Ignoring unknown settings: {unknown}")
    return RunConfig(**{k: v for k, v in values.items() if k in known}).validate()
