"""Shared pytest plumbing.

The acceptance tests each record a one-line PASS/FAIL verdict; the terminal
summary prints them together at the end of the run so the criterion results
are visible even when every test passes.
"""
from __future__ import annotations

_CRITERION_LINES: list[str] = []


def record_criterion(line: str) -> None:
    _CRITERION_LINES.append(line)
    print(line)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: end-to-end acceptance criteria (slow, statistical)")


def pytest_terminal_summary(terminalreporter):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)
