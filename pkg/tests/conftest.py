from __future__ import annotations

from functools import lru_cache

import pytest

from polygroupoids import GroupSpec, build_standard

GRID = [(2, "2", 4), (2, "3", 4), (2, "4", 4), (3, "2", 5), (3, "2x2", 5), (4, "2", 6)]


@lru_cache(maxsize=None)
def std(n, group, m):
    """Shared standard models; structures are immutable apart from caches."""
    return build_standard(n, GroupSpec.parse(group), m)


def grid_id(p):
    return "n{}-Z{}-m{}".format(*p)


@pytest.fixture(params=GRID, ids=grid_id)
def grid_point(request):
    return request.param


# acceptance reporting: one line per criterion at the end of the run

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or hasattr(report, "wasxfail"):
        return
    if report.when == "call" or report.failed or report.skipped:
        ok = report.passed if report.when == "call" else not (report.failed or report.skipped)
        k = mark.args[0]
        _CRITERIA[k] = _CRITERIA.get(k, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {k}: {'PASS' if _CRITERIA[k] else 'FAIL'}")
