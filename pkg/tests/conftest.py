"""Shared pytest wiring.

The only machinery here is the acceptance summary: every test in
test_acceptance.py is named test_criterion_NN_<slug>, and after the run we
print one PASS/FAIL line per criterion so the verdicts are readable without
scrolling through the full -v listing.
"""

from __future__ import annotations

import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_outcomes: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    match = _CRITERION.search(item.name)
    if match is None:
        return
    number, slug = match.group(1), match.group(2)
    if report.when == "call":
        _outcomes[number] = (slug, report.outcome)
    elif report.when == "setup" and report.outcome != "passed":
        _outcomes[number] = (slug, report.outcome)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        slug, outcome = _outcomes[number]
        verdict = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(
            f"[criterion-{number}] {slug.replace('_', ' ')}: {verdict}"
        )
