"""Shared fixtures and the acceptance-criteria summary hook."""

from __future__ import annotations

import re

_CRITERIA = {
    1: "elliptic oracle equivalence",
    2: "limit reproduction",
    3: "cross-quadrature identity",
    4: "minimality residuals",
    5: "isometry suite",
    6: "lift suite",
    7: "transversality estimate",
    8: "foliation",
    9: "solver oracle",
    10: "douglas arithmetic",
    11: "slab audits",
}

_NODE_RE = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_results: dict[int, bool] = {}


def pytest_runtest_logreport(report) -> None:
    match = _NODE_RE.search(report.nodeid)
    if match is None:
        return
    number = int(match.group(1))
    if report.failed:
        _results[number] = False
    elif report.when == "call" and report.passed:
        _results.setdefault(number, True)
    elif report.skipped:
        _results.setdefault(number, False)


def pytest_terminal_summary(terminalreporter) -> None:
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        verdict = "PASS" if _results[number] else "FAIL"
        label = _CRITERIA.get(number, "?")
        terminalreporter.write_line(f"ACCEPTANCE {number:2d} ({label}): {verdict}")
