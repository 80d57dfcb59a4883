import random

import pytest
from hypothesis import strategies as st

from doxepi.relalg import Relation, StateSpace


@pytest.fixture
def rng():
    return random.Random(20240611)


@st.composite
def relations(draw, min_size=1, max_size=6):
    n = draw(st.integers(min_size, max_size))
    space = StateSpace.of_size(n)
    cells = draw(st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))
    return Relation.from_pairs(space, cells)


def rel(n, pairs):
    return Relation.from_pairs(StateSpace.of_size(n), pairs)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
