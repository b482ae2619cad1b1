import numpy as np
import pytest

from neumannkit.eigenfield import closed_form
from neumannkit.geometry import DomainSpec
from neumannkit.suite import OVAL, Workspace


@pytest.fixture(scope="session")
def ws():
    """One workspace for the whole run, so expensive fields are built once."""
    return Workspace()


@pytest.fixture(scope="session")
def square1():
    return closed_form(DomainSpec.square(), 1)


@pytest.fixture(scope="session")
def disk1():
    return closed_form(DomainSpec.disk(), 1)


@pytest.fixture(scope="session")
def disk2():
    return closed_form(DomainSpec.disk(), 2)


@pytest.fixture(scope="session")
def annulus1():
    return closed_form(DomainSpec.annulus(0.5), 1)


@pytest.fixture(scope="session")
def oval():
    return DomainSpec.star(OVAL)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance lines are collected here and echoed after the run, so they
# show up in `pytest -v` output without needing -s
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[crit])
