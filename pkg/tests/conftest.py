from __future__ import annotations

import itertools

from hypothesis import strategies as st

from cramlab.graph import Graph


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 7, min_edges: int = 0):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, min_size=min_edges) if pairs else st.just([]))
    return Graph(n, chosen)


ACCEPT_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPT_LINES:
            terminalreporter.write_line(line)
