import numpy as np
import pytest

from gptlab.core import direct_sum, simplex
from gptlab.fixtures import hexagon, pentagon, prism, square


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture(scope="session")
def sq():
    return square()


@pytest.fixture(scope="session")
def pent():
    return pentagon()


@pytest.fixture(scope="session")
def hexa():
    return hexagon()


@pytest.fixture(scope="session")
def prism_space():
    return prism()


@pytest.fixture(scope="session")
def pent_pair():
    return direct_sum([pentagon(), pentagon()])


@pytest.fixture(scope="session")
def s2():
    return simplex(2)


@pytest.fixture(scope="session")
def s3():
    return simplex(3)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        def key(line):
            tag = line.split()[1]
            digits = "".join(ch for ch in tag if ch.isdigit())
            return int(digits), tag

        for line in sorted(ACCEPTANCE_LINES, key=key):
            terminalreporter.write_line(line)
