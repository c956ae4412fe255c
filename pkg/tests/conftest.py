import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from biasnet.graph import from_edges

sys.path.insert(0, str(Path(__file__).parent))


@st.composite
def graphs(draw, max_n=12, min_n=1):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    labels = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    return from_edges(n, edges, labels)


@pytest.fixture
def path4():
    return from_edges(4, [(0, 1), (1, 2), (2, 3)], [0, 0, 1, 1])


@pytest.fixture
def triangle():
    return from_edges(3, [(0, 1), (1, 2), (0, 2)], [0, 1, 0])


@pytest.fixture
def k22():
    # sides {0, 1} and {2, 3}
    return from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)], [0, 0, 1, 1])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)
