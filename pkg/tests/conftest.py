import random

import pytest

from _util import World


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(scope="session")
def compact_world():
    return World("compact", L=10, t=2, n=3, users=3, seed=11)


@pytest.fixture(scope="session")
def div_world():
    return World("divisible", L=10, t=2, n=3, users=3, seed=12)


@pytest.fixture(scope="session", params=["compact", "divisible"])
def world(request, compact_world, div_world):
    return compact_world if request.param == "compact" else div_world


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    num = getattr(report, "_criterion", None)
    if num is None:
        return
    prev = _criteria.get(num[0])
    failed = report.failed or (prev is not None and prev[1] == "FAIL")
    if report.when == "call" or report.failed:
        _criteria[num[0]] = (num[1], "FAIL" if failed else "PASS")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result()._criterion = m.args


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, status = _criteria[num]
        terminalreporter.write_line(f"criterion {num:>2}  {status}  {title}")
