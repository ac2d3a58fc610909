"""Acceptance tests carry a `criterion` marker; one PASS/FAIL line per
criterion is printed at the end of the run."""

from __future__ import annotations

import pytest

_results: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.fixture
def detail(request):
    """Append a human-readable line to the criterion summary."""
    lines: list[str] = []
    request.node.user_properties.append(("detail", lines))
    return lines.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not rep.failed:
        return
    n = marker.args[0]
    lines = next((v for k, v in item.user_properties if k == "detail"), [])
    entry = _results.setdefault(n, ["PASS", []])
    if not rep.passed:
        entry[0] = "FAIL"
        lines = lines + [f"{item.name} failed"]
    entry[1].extend(lines)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        status, lines = _results[n]
        terminalreporter.write_line(f"criterion {n}: {status}")
        for line in lines:
            terminalreporter.write_line(f"    {line}")
