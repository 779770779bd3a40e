"""
hopfring
========

Modular invariants of GL_n(F_p), the mod-p Dyer-Lashof algebra and the
Hopf ring {H_*QS^k} at odd primes, with verifiers for the identities that
tie them together.
"""

from .biv_algebra import CohomClass, GLnMatrix, HomClass
from .config import RunConfig, load_config
from .dyer_lashof import DLElement, DLString, adem_reduce
from .errors import HopfRingError, ParseError, TruncationOverflow
from .fp_core import FpScalar, binom_mod_p
from .hopf_ring import HopfElement, HopfRing
from .invariants import IndexString, dickson_q, mui_R
from .report import CheckResult, CheckStatus, Report
from .series import TruncSeries
from .suites import SUITES, run_suite

__all__ = [
    'CheckResult', 'CheckStatus', 'CohomClass', 'DLElement', 'DLString', 'FpScalar',
    'GLnMatrix', 'HomClass', 'HopfElement', 'HopfRing', 'HopfRingError', 'IndexString',
    'ParseError', 'Report', 'RunConfig', 'SUITES', 'TruncSeries', 'TruncationOverflow',
    'adem_reduce', 'binom_mod_p', 'dickson_q', 'load_config', 'mui_R', 'run_suite',
]
