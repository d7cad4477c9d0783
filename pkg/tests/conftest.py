from __future__ import annotations

import pytest

from agechain import PSequence

_acceptance_results: dict[tuple[int, str], bool] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(num, title): numbered acceptance criterion; reported in the "
        "terminal summary with one PASS/FAIL line each",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    key = (int(marker.args[0]), marker.args[1])
    if rep.when == "call":
        _acceptance_results[key] = rep.passed
    elif rep.when == "setup" and rep.failed:
        _acceptance_results[key] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for (num, title), ok in sorted(_acceptance_results.items()):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {num:2d} {status}  {title}")


@pytest.fixture(scope="session")
def osc():
    """The reference oscillating sequence: p_inf = 1/2, xi = 2."""
    return PSequence.oscillating(0.5, 2.0)


@pytest.fixture(scope="session")
def const03():
    return PSequence.constant(0.3)
