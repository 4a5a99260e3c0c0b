from __future__ import annotations

import pytest

from shiftconv.coeffs import ramanujan_tau

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def tau_small():
    return ramanujan_tau(3000)


@pytest.fixture(scope="session")
def tau_medium():
    return ramanujan_tau(25000)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
