"""Shared test helpers: acceptance-criterion reporting.

``record_criterion`` stores one PASS/FAIL line per acceptance criterion;
the terminal-summary hook prints them after the run so the verdicts are
visible even under captured output.
"""
from __future__ import annotations

_CRITERION_LINES: dict = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    verdict = "PASS" if passed else "FAIL"
    _CRITERION_LINES[number] = f"CRITERION {number}: {verdict} — {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERION_LINES):
        terminalreporter.write_line(_CRITERION_LINES[number])
