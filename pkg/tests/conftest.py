import sys

import numpy as np
import pytest

from bergman_toeplitz.measures import atoms
from bergman_toeplitz.quadrature import build_disk_quadrature


@pytest.fixture(scope="session")
def quad():
    return build_disk_quadrature()


@pytest.fixture(scope="session")
def three_atoms():
    return atoms([0.3, -0.2 + 0.5j, -0.4 - 0.3j], [1.0, 0.5, 0.25], name="three_atoms")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
