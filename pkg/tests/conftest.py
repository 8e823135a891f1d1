import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from darkbright.graphs import build_dangling_bond, build_line, build_ring, hamiltonian_from_graph  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    """Collect one pass/fail line per acceptance criterion, printed at session end."""
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def line5():
    return hamiltonian_from_graph(build_line(5))


@pytest.fixture
def ring6():
    return hamiltonian_from_graph(build_ring(6))


@pytest.fixture
def dangling():
    return hamiltonian_from_graph(build_dangling_bond())


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
