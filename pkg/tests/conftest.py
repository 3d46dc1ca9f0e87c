import numpy as np
import pytest

from hyperspace.hspace import random_finite_space
from oracles import ACCEPTANCE_LINES


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=range(6))
def small_space(request):
    gen = np.random.default_rng(1000 + request.param)
    return random_finite_space(gen, int(gen.integers(1, 7)), kind=("cloud", "graph")[request.param % 2])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
