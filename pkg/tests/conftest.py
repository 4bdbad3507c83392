import numpy as np
import pytest

from flsmodel import CORE, FlsSpec, ModelGraph

_CRITERIA: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not report.failed:
        return
    marker = getattr(report, "_criterion", None)
    if marker is None:
        return
    n, title = marker
    _CRITERIA.setdefault(n, (title, []))[1].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep._criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, outcomes = _CRITERIA[n]
        ok = outcomes and all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20231)


@pytest.fixture
def spec():
    return FlsSpec(nu=1.0, beta=4.0, force_n=5.0, omega=2.0)


@pytest.fixture
def core_graph():
    return ModelGraph(CORE)
