"""Shared pytest hooks.

Tests marked ``criterion(number, title)`` are acceptance checks.  Their
outcomes, together with any ``detail`` entries they add through
``record_property``, are collected here and printed as one line per
criterion at the end of the run.
"""
from __future__ import annotations

import pytest

_CRITERIA: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": True, "seconds": 0.0, "details": []})
    if report.when == "call":
        entry["seconds"] = report.duration
        entry["details"] = [str(v) for k, v in item.user_properties if k == "detail"]
    if report.failed:
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        verdict = "PASS" if entry["passed"] else "FAIL"
        terminalreporter.write_line(
            f"criterion {number:>2}: {verdict}  {entry['title']} ({entry['seconds']:.1f} s)")
        for detail in entry["details"]:
            terminalreporter.write_line(f"              {detail}")
