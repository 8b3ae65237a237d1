"""Per-criterion PASS/FAIL summary for the acceptance suite."""

from collections import defaultdict

import pytest

_results: dict[int, list] = defaultdict(list)
_titles: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _titles[m.args[0]] = m.args[1]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None or (rep.when != "call" and not rep.failed):
        return
    _results[m.args[0]].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_titles):
        runs = _results.get(n, [])
        if not runs:
            tr.write_line(f"criterion {n:2d}: NOT RUN  {_titles[n]}")
            continue
        ok = all(passed for _, passed in runs)
        failed = [name for name, passed in runs if not passed]
        extra = "" if ok else f"  (failing: {', '.join(failed)})"
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {_titles[n]}{extra}")
