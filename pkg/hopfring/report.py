"""
Verification Reports
====================

Per-check results and the suite report written by the CLI:
- CheckStatus: pass / fail / skipped / overflow
- CheckResult: one check with its counterexample and notes
- Report: a suite run with its config, timing and peak memory

Reports serialise to JSON, CSV rows or a plain-text table.
"""

from dataclasses import asdict, dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional
import csv
import io
import json
import logging
import threading
import time

import psutil

logger = logging.getLogger(__name__)


class CheckStatus(Enum):
    """Outcome of a single check."""
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"        # Outside the configured budget
    OVERFLOW = "overflow"      # Hit degree_max mid-computation


@dataclass
class CheckResult:
    """One verified identity, count or property."""
    name: str
    status: CheckStatus
    counterexample: Optional[Dict[str, Any]] = None
    notes: List[str] = field(default_factory=list)
    elapsed: float = 0.0

    @classmethod
    def passed(cls, name: str, notes: Optional[List[str]] = None) -> 'CheckResult':
        return cls(name, CheckStatus.PASS, notes=list(notes or []))

    @classmethod
    def failed(cls, name: str, counterexample: Dict[str, Any],
               notes: Optional[List[str]] = None) -> 'CheckResult':
        return cls(name, CheckStatus.FAIL, counterexample=counterexample, notes=list(notes or []))

    @classmethod
    def skipped(cls, name: str, reason: str) -> 'CheckResult':
        return cls(name, CheckStatus.SKIPPED, notes=[reason])

    @classmethod
    def from_bool(cls, name: str, ok: bool, counterexample: Optional[Dict[str, Any]] = None,
                  notes: Optional[List[str]] = None) -> 'CheckResult':
        if ok:
            return cls.passed(name, notes)
        return cls.failed(name, counterexample or {"name": name}, notes)

    @property
    def ok(self) -> bool:
        return self.status in (CheckStatus.PASS, CheckStatus.SKIPPED)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['status'] = self.status.value
        return data


class PeakMemory:
    """Samples the resident set size of this process; keeps the maximum seen."""

    def __init__(self):
        self._process = psutil.Process()
        self._lock = threading.Lock()
        self.peak = 0
        self.sample()

    def sample(self) -> int:
        try:
            rss = self._process.memory_info().rss
        except (psutil.NoSuchProcess, psutil.AccessDenied):
            return self.peak
        with self._lock:
            self.peak = max(self.peak, rss)
        return rss

    @property
    def peak_mb(self) -> float:
        return round(self.peak / (1024 * 1024), 2)


@dataclass
class Report:
    """A suite run: its config, checks, timing and memory."""
    suite: str
    config: Dict[str, Any]
    checks: List[CheckResult] = field(default_factory=list)
    started_at: str = field(default_factory=lambda: datetime.utcnow().isoformat())
    elapsed: float = 0.0
    peak_memory_mb: float = 0.0

    def add(self, result: CheckResult) -> None:
        self.checks.append(result)
        if result.status == CheckStatus.FAIL:
            logger.debug(f"FAIL {result.name}: {result.counterexample}")
        else:
            logger.debug(f"{result.status.value} {result.name}")
        for note in result.notes:
            if result.status != CheckStatus.SKIPPED:
                logger.warning(f"{result.name}: {note}")

    def extend(self, results: List[CheckResult]) -> None:
        for result in results:
            self.add(result)

    def counts(self) -> Dict[str, int]:
        counts = {status.value: 0 for status in CheckStatus}
        for check in self.checks:
            counts[check.status.value] += 1
        return counts

    @property
    def passed(self) -> bool:
        return all(check.ok for check in self.checks)

    @property
    def overflowed(self) -> bool:
        return any(check.status == CheckStatus.OVERFLOW for check in self.checks)

    def exit_code(self) -> int:
        """0 pass, 1 fail, 3 overflow (a failure outranks an overflow)."""
        if any(check.status == CheckStatus.FAIL for check in self.checks):
            return 1
        if self.overflowed:
            return 3
        return 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'suite': self.suite,
            'config': self.config,
            'started_at': self.started_at,
            'elapsed': round(self.elapsed, 3),
            'peak_memory_mb': self.peak_memory_mb,
            'counts': self.counts(),
            'checks': [check.to_dict() for check in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(['suite', 'check', 'status', 'elapsed', 'counterexample', 'notes'])
        for check in self.checks:
            writer.writerow([
                self.suite,
                check.name,
                check.status.value,
                f"{check.elapsed:.3f}",
                json.dumps(check.counterexample, default=str) if check.counterexample else '',
                ' | '.join(check.notes),
            ])
        return buffer.getvalue()

    def to_text(self) -> str:
        lines = [f"suite: {self.suite}"]
        width = max((len(check.name) for check in self.checks), default=10)
        for check in self.checks:
            lines.append(f"  {check.name:<{width}}  {check.status.value.upper()}")
            if check.counterexample:
                lines.append(f"    counterexample: {json.dumps(check.counterexample, default=str)}")
            for note in check.notes:
                lines.append(f"    note: {note}")
        counts = self.counts()
        lines.append(
            f"{counts['pass']} passed, {counts['fail']} failed, {counts['skipped']} skipped, "
            f"{counts['overflow']} overflow in {self.elapsed:.2f}s (peak {self.peak_memory_mb} MB)")
        return "\n".join(lines)

    def render(self, fmt: str) -> str:
        if fmt == 'json':
            return self.to_json()
        if fmt == 'csv':
            return self.to_csv()
        return self.to_text()


def timed(fn, *args, **kwargs):
    """Run fn and return (result, seconds)."""
    start = time.monotonic()
    result = fn(*args, **kwargs)
    return result, time.monotonic() - start
