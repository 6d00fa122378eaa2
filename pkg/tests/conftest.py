import numpy as np
import pytest

from bbm_modlab.grid import DEFAULT_GRID, GridSpec
from bbm_modlab.modspace import build_decomposition

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(16 * np.pi, 1024)


@pytest.fixture(scope="session")
def small_dec(small_grid):
    return build_decomposition(small_grid, k_max=12)


@pytest.fixture(scope="session")
def grid():
    return DEFAULT_GRID


@pytest.fixture(scope="session")
def dec(grid):
    return build_decomposition(grid)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
