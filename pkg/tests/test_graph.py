import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cramlab.errors import GraphFormatError, UnknownGraphError
from cramlab.graph import (
    Graph,
    enumerate_copies,
    graph_from_name,
    is_isomorphic,
    make_named,
    parse_graph,
    serialize_graph,
)
from conftest import graphs
from naive import count_copies, nx_graph

import networkx as nx


def test_named_complete_and_cycle():
    k4 = make_named("K", [4])
    assert (k4.n, k4.num_edges) == (4, 6)
    c5 = make_named("C", [5])
    assert (c5.n, c5.num_edges) == (5, 5)


def test_k6_minus_triangle_non_edges():
    g = make_named("K6-minus-triangle", [])
    assert (g.n, g.num_edges) == (6, 12)
    missing = {e for e in itertools.combinations(range(6), 2) if not g.has_edge(*e)}
    # 1-based labels 13, 35, 15
    assert missing == {(0, 2), (2, 4), (0, 4)}


@pytest.mark.parametrize(
    "name, n, e",
    [
        ("K5", 5, 10),
        ("C7", 7, 7),
        ("K1,3", 4, 3),
        ("P3", 3, 2),
        ("K4-e", 4, 5),
        ("K5-", 5, 9),
        ("Q3", 8, 12),
        ("Petersen", 10, 15),
        ("book:3", 5, 7),
        ("blowup:C8:2", 16, 32),
        ("bowtie", 5, 6),
    ],
)
def test_graph_from_name(name, n, e):
    g = graph_from_name(name)
    assert (g.n, g.num_edges) == (n, e)


def test_blowup_is_regular():
    g = graph_from_name("blowup:C8:2")
    assert set(g.degrees) == {4}


@pytest.mark.parametrize("bad", [("C", [2]), ("nope", []), ("K", [])])
def test_named_errors(bad):
    with pytest.raises(UnknownGraphError):
        make_named(*bad)


def test_parse_triangle():
    g = parse_graph("n 3\n0 1\n1 2\n0 2")
    assert g == make_named("K", [3])


@pytest.mark.parametrize(
    "text",
    ["n 2\n0 0", "n 2\n0 2", "n 3\n0 1\n1 0", "n 3\n0 x", "0 1", "n 3\n0 1 2"],
)
def test_parse_errors(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_parse_comments_and_blank_lines():
    g = parse_graph("# a path\nn 3\n\n1 0  # reversed\n2 1\n")
    assert list(g.edges) == [(0, 1), (1, 2)]


@given(graphs())
def test_serialize_round_trip(g):
    assert parse_graph(serialize_graph(g)) == g


@given(graphs())
def test_edges_sorted_and_simple(g):
    assert list(g.edges) == sorted(set(g.edges))
    assert all(u < v < g.n for u, v in g.edges)


@pytest.mark.parametrize(
    "pattern, host, count", [("K3", "K4", 4), ("C4", "K4", 3), ("K3", "C5", 0)]
)
def test_copy_counts(pattern, host, count):
    assert len(enumerate_copies(graph_from_name(pattern), graph_from_name(host))) == count


PATTERNS = ["K3", "P3", "C4", "K1,3", "K4-e", "P4"]


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=7), st.sampled_from(PATTERNS))
def test_copies_match_naive(host, name):
    pattern = graph_from_name(name)
    copies = enumerate_copies(pattern, host)
    assert len(copies) == count_copies(pattern, host)
    assert len(set(copies)) == len(copies)
    for cp in copies:
        assert len(cp) == pattern.num_edges and cp <= host.edge_set
        assert nx.is_isomorphic(nx_graph(cp), nx_graph(pattern.edges))


@settings(max_examples=60, deadline=None)
@given(graphs(min_n=2, max_n=7), st.sampled_from(PATTERNS), st.data())
def test_copies_monotone(host, name, data):
    missing = [e for e in itertools.combinations(range(host.n), 2) if not host.has_edge(*e)]
    if not missing:
        return
    extra = data.draw(st.sampled_from(missing))
    pattern = graph_from_name(name)
    before = set(enumerate_copies(pattern, host))
    after = set(enumerate_copies(pattern, host.with_edges([extra])))
    assert before <= after


def test_enumerate_is_deterministic():
    a = enumerate_copies(graph_from_name("C4"), graph_from_name("Q3"))
    b = enumerate_copies(graph_from_name("C4"), graph_from_name("Q3"))
    assert a == b and len(a) == 6


def test_isomorphism_examples():
    c4 = graph_from_name("C4")
    assert is_isomorphic(c4, c4.relabel([2, 0, 3, 1]))
    assert not is_isomorphic(graph_from_name("K4-e"), c4)
    k5 = graph_from_name("K5")
    other = Graph(5, [e for e in k5.edges if e != (2, 4)])
    assert is_isomorphic(graph_from_name("K5-"), other)


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=6), graphs(max_n=6))
def test_isomorphism_matches_networkx(a, b):
    assert is_isomorphic(a, b) == nx.is_isomorphic(nx_graph(a.edges, a.n), nx_graph(b.edges, b.n))


def test_empty_pattern_rejected():
    with pytest.raises(ValueError):
        enumerate_copies(Graph(2), graph_from_name("K3"))
