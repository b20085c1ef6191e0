import itertools

import numpy as np
import pytest

from percolab.graph import build_graph


def path_graph(n):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def random_graph(n, p, rng):
    pairs = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return build_graph(n, pairs)


def random_tree(n, rng):
    return build_graph(n, [(int(rng.integers(0, i)), i) for i in range(1, n)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
