import numpy as np
import pytest

from nlwitness.states import bell_basis, random_separable, sample_ginibre_state, singlet


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def bell():
    return bell_basis()


@pytest.fixture
def rho_singlet():
    return singlet()


@pytest.fixture(scope="session")
def separable_fixtures():
    g = np.random.default_rng(99)
    return [random_separable((2, 2), g) for _ in range(20)]


@pytest.fixture(scope="session")
def ginibre_states():
    g = np.random.default_rng(7)
    return [sample_ginibre_state((2, 2), g) for _ in range(200)]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
