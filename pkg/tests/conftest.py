from __future__ import annotations

import pytest

from posetunit.catalog import load_catalog
from posetunit.stability import search_subdims

CRITERIA = {
    1: "(1,1,1) example: A matrix and extremal rays",
    2: "(N,2) example: subdimension rows, A matrix, rays, all-ones on the boundary",
    3: "catalog rows: nesting, quite sincere, stable under the listed weight",
    4: "critical families: roots, bricks, inequivalence, stability, witnesses, slope",
    5: "stable iff balanced on cone samples, certificates off the interior",
    6: "pi_alpha: strictly semistable, equality witness, indecomposable non-brick",
    7: "duality between P5 and P5*",
    8: "weight extension keeps stability",
    9: "randomised property suites",
    10: "trace fingerprints separate family members",
}

_outcomes: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion exercised by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or rep.outcome != "passed":
        _outcomes.setdefault(mark.args[0], []).append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        got = _outcomes.get(n)
        if not got:
            status = "NOT RUN"
        elif all(o == "passed" for o in got):
            status = "PASS"
        elif any(o == "failed" for o in got):
            status = "FAIL"
        else:
            status = "SKIPPED"
        terminalreporter.write_line(f"ACCEPTANCE {n:2d}: {status:7s} {title}")


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


class _SubdimCache:
    """search_subdims results shared across tests (the search is the slow part)."""

    def __init__(self, cat):
        self.cat = cat
        self.store = {}

    def __call__(self, entry_id: str, lam=None):
        key = (entry_id, lam)
        if key not in self.store:
            self.store[key] = search_subdims(self.cat[entry_id].rep(lam))
        return self.store[key]


@pytest.fixture(scope="session")
def subdims(catalog):
    return _SubdimCache(catalog)
