from pathlib import Path

import pytest

from brute import corpus_params
from knockout.graph import DirectedGraph, random_instance

DATA = Path(__file__).parent / "data"

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = []


def dg1_graph():
    # a1..a5 are arc indices 0..4
    return DirectedGraph(4, [(1, 2, 1), (2, 4, 1), (1, 3, 1), (3, 4, 1), (1, 4, 5)], 1, 4)


@pytest.fixture
def dg1():
    return dg1_graph()


def corpus(count=200):
    out = []
    for seed in range(count):
        nodes, arcs = corpus_params(seed)
        out.append(random_instance(nodes, arcs, (1, 10), seed))
    return out


@pytest.fixture(scope="session")
def small_corpus():
    return corpus()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
