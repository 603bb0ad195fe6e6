import numpy as np
import pytest

from wpc.fuchsian import GroupPresentation, build_octagon_group, enumerate_group


@pytest.fixture(scope="session")
def octagon():
    return build_octagon_group()


@pytest.fixture(scope="session")
def E3(octagon):
    return enumerate_group(octagon, 3)


@pytest.fixture(scope="session")
def E4(octagon):
    return enumerate_group(octagon, 4)


@pytest.fixture(scope="session")
def E6(octagon):
    return enumerate_group(octagon, 6)


@pytest.fixture(scope="session")
def trivial():
    return enumerate_group(GroupPresentation.trivial(), 0)


def random_disk(rng, n, rmax=0.9):
    return rmax * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
