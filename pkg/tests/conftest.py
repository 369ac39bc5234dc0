import numpy as np
import pytest
from hypothesis import settings, strategies as st

from ustsample.graph import Multigraph

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@st.composite
def connected_multigraphs(draw, min_n=2, max_n=12, max_extra=12, multi=True):
    """Random spanning tree plus extra (possibly parallel) edges."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, draw(st.integers(0, i - 1))) for i in range(1, n)]
    extra = draw(st.integers(0, max_extra))
    for _ in range(extra):
        a = draw(st.integers(0, n - 1))
        b = draw(st.integers(0, n - 1))
        if a != b and (multi or (min(a, b), max(a, b)) not in {tuple(sorted(p)) for p in pairs}):
            pairs.append((a, b))
    return Multigraph.from_edges(n, pairs)


@pytest.fixture
def triangle():
    return Multigraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def square():
    return Multigraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
