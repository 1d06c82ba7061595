import numpy as np
import pytest

from slmqudit.presets import oracle_geometry


@pytest.fixture(scope="session")
def geom3():
    return oracle_geometry(D=3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
