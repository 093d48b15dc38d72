import math

import numpy as np
import pytest

SQ2 = math.sqrt(2.0)

_acceptance_lines = []


def splitter_U():
    return np.array([[1, 1j], [1j, 1]]) / SQ2


def splitter_V():
    return np.array([[1j, 1j], [-1, 1]]) / SQ2


def lossy_T(eta):
    return 0.5 * np.array([[-eta + 1j, -1 + 1j * eta], [-1 + 1j * eta, eta - 1j]])


def device_M(theta):
    """The 3x3 device matrix written out entry by entry."""
    c, s = math.cos(theta), math.sin(theta)
    m = np.zeros((3, 3), dtype=complex)
    m[:2, :2] = lossy_T(c)
    m[0, 2] = -s / SQ2
    m[1, 2] = 1j * s / SQ2
    m[2, 0] = -s / SQ2
    m[2, 1] = 1j * s / SQ2
    m[2, 2] = c
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        doc = getattr(report, "criterion", None) or report.nodeid.split("::")[-1]
        _acceptance_lines.append(f"{'PASS' if report.passed else 'FAIL'}  {doc}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        rep.criterion = marker.args[0]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(text): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
