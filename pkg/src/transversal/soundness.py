"""Universal post-hook applied to every object the constructors emit.

Each constructor runs the matching validator on its output and hands the
report to :func:`gate` before returning.  A failing report raises
:class:`SoundnessError`, so an invalid object can never escape.  The gate also
keeps per-kind counters which the test-suite and the CLI reports read.
"""
from __future__ import annotations

from collections import Counter

from .core import Report

_checks: Counter = Counter()
_failures: Counter = Counter()


class SoundnessError(AssertionError):
    """A constructor produced an object rejected by its validator."""

    def __init__(self, kind: str, report: Report):
        first = report.first
        detail = f"{first.reason} at {first.index}: {first.detail}" if first else "?"
        super().__init__(f"{kind} failed validation: {detail}")
        self.kind = kind
        self.report = report


def gate(kind: str, report: Report) -> None:
    """Count one validation of ``kind`` and raise if it failed."""
    _checks[kind] += 1
    if not report.ok:
        _failures[kind] += 1
        raise SoundnessError(kind, report)


def stats() -> dict:
    """Counters since the last :func:`reset`, as plain dictionaries."""
    return {
        "checks": dict(sorted(_checks.items())),
        "failures": dict(sorted(_failures.items())),
        "total_checks": sum(_checks.values()),
        "total_failures": sum(_failures.values()),
    }


def reset() -> None:
    _checks.clear()
    _failures.clear()
