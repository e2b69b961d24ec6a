"""Shared fixtures plus a per-test summary for the acceptance suite."""
from __future__ import annotations

import importlib.resources as resources

import pytest

from voltisle import parse_timing_report, synthesize_slack_table

_acceptance_results: dict = {}


@pytest.fixture(scope="session")
def fragment_text() -> str:
    return (
        resources.files("voltisle.data")
        .joinpath("sample_timing_fragment.rpt")
        .read_text(encoding="utf-8")
    )


@pytest.fixture(scope="session")
def fragment_paths(fragment_text):
    return parse_timing_report(fragment_text)


@pytest.fixture(scope="session")
def table16():
    return synthesize_slack_table(16, 16, "row_gradient", seed=11)


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call":
        _acceptance_results[report.nodeid] = report.outcome
    elif report.when == "setup" and report.outcome != "passed":
        _acceptance_results[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance results")
    for nodeid, outcome in _acceptance_results.items():
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {nodeid.split('::')[-1]}")
