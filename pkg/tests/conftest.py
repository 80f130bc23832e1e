import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import heraldpy as hp  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def rect():
    return hp.make_rectangular()


@pytest.fixture(scope="session")
def gauss():
    return hp.make_gaussian()


@pytest.fixture(scope="session")
def lorentz():
    return hp.make_lorentzian()


@pytest.fixture(scope="session")
def builtin(rect, gauss, lorentz):
    return {"rectangular": rect, "gaussian": gauss, "lorentzian": lorentz}
