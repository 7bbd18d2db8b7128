import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cramlab.colouring import has_monochromatic_star, has_rainbow_copy
from cramlab.errors import ContractViolation, DensityBoundError, PreconditionError
from cramlab.graph import Graph, disjoint_union, graph_from_name
from cramlab.triangle import (
    Step,
    TriangleSequence,
    build_sequence,
    candidate_sequences,
    check_sequence,
    colour_graph_triangle_mode,
    colour_k13,
    colour_k14,
    is_triangle_connected,
    r_value,
    random_sequence,
    triangle_components,
)
from conftest import graphs
from corpus import triangle_connected_graphs
from naive import triangle_connected_subgraph_excess

K3 = graph_from_name("K3")
K4 = graph_from_name("K4")
K5 = graph_from_name("K5")
K5M = graph_from_name("K5-")


def sound(col, k):
    return not has_monochromatic_star(col, k) and not has_rainbow_copy(col, K3)


def test_components_examples():
    assert triangle_components(K4) == [tuple(K4.edges)]
    bow = triangle_components(graph_from_name("bowtie"))
    assert [len(c) for c in bow] == [3, 3]
    assert triangle_components(graph_from_name("C5")) == []


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=9))
def test_components_partition_triangle_edges(g):
    comps = triangle_components(g)
    flat = [e for c in comps for e in c]
    assert len(flat) == len(set(flat))
    in_triangle = {
        e for e in g.edges if g.adj[e[0]] & g.adj[e[1]]
    }
    assert set(flat) == in_triangle
    for c in comps:
        sub, _ = g.compact(c)
        assert is_triangle_connected(sub)


def test_sequence_examples():
    assert build_sequence(K3).ell == 0
    s = build_sequence(K4)
    assert (s.ell, s.start_kind, [st.degree for st in s.steps]) == (1, "triangle", [3])
    s = build_sequence(K5M, allow_rich_starts=True)
    assert (s.ell, s.start_kind) == (0, "K5minus")
    # starts are induced, so K5 itself only offers K4 starts
    assert build_sequence(K5, allow_rich_starts=True).start_kind == "K4"
    s = build_sequence(graph_from_name("book:3"), allow_rich_starts=True)
    assert s.start_kind == "triangle"


def test_sequence_requires_triangle_connected():
    with pytest.raises(PreconditionError):
        build_sequence(graph_from_name("bowtie"))
    with pytest.raises(PreconditionError):
        r_value(graph_from_name("C5"))


def test_r_examples():
    assert (r_value(K3), r_value(K4), r_value(K5)) == (0, 1, 3)


def test_check_sequence_catches_bad_records():
    good = build_sequence(K4)
    check_sequence(K4, good)
    step = good.steps[0]
    bad = TriangleSequence("triangle", good.start, (Step(step.vertex, step.anchor, step.added[:2]),))
    with pytest.raises(ContractViolation):
        check_sequence(K4, bad)


def corpus(max_vertices=7, max_excess=0):
    return triangle_connected_graphs(max_vertices, max_excess)


def test_corpus_is_nonempty():
    assert len(corpus()) == 150


def test_r_identity_over_corpus():
    rng = random.Random(5)
    for t in corpus(7, 1):
        expected = t.num_edges - 2 * t.n + 3
        assert r_value(t) == expected
        for seq in candidate_sequences(t, False, "late", limit=5):
            check_sequence(t, seq)
            assert seq.r == expected
        for _ in range(3):
            seq = random_sequence(t, rng)
            check_sequence(t, seq)
            assert seq.r == expected
        rich = build_sequence(t, allow_rich_starts=True)
        check_sequence(t, rich)
        excess = {"triangle": 0, "K4": 1, "K5minus": 2}[rich.start_kind]
        assert rich.r + excess == expected


def test_component_excess_dominates_subgraphs():
    for t in corpus(6, 2):
        assert triangle_connected_subgraph_excess(t) == t.num_edges - 2 * t.n


@settings(max_examples=40, deadline=None)
@given(graphs(min_n=3, max_n=8))
def test_scan_is_exact_on_random_graphs(g):
    from cramlab.experiments import scan_triangle_density
    from cramlab.triangle import triangles

    # the brute force is exponential in the triangle count
    assume(len(triangles(g)) <= 12)
    assert scan_triangle_density(g).max_excess == triangle_connected_subgraph_excess(g)


def test_preferences_order_irregular_steps():
    t = graph_from_name("K5")
    early = build_sequence(t, preference="early")
    late = build_sequence(t, preference="late")
    assert early.irregular_steps() <= late.irregular_steps()
    assert early.irregular_steps()[0] == 1


def test_k14_examples():
    assert sound(colour_k14(K4), 4)
    col = colour_k14(K5)
    assert sound(col, 4) and not col.meta["fallback"]
    with pytest.raises(DensityBoundError):
        colour_k14(graph_from_name("K6"))


def test_k13_examples():
    col = colour_k13(K4)
    assert sound(col, 3)
    pairs = col.meta["pairs"]
    assert sorted(map(tuple, pairs.values())).count((0, 0)) == 4
    assert {tuple(p) for p in pairs.values()} == {(0, 0), (0, 1), (0, 2)}

    col = colour_k13(K5M)
    assert sound(col, 3)
    assert sorted(map(tuple, col.meta["pairs"].values())).count((0, 0)) == 5

    with pytest.raises(DensityBoundError):
        colour_k13(K5)


def test_constructive_colourings_over_small_corpus():
    for t in corpus(7, 0):
        col = colour_k14(t)
        assert sound(col, 4) and not col.meta["fallback"]
        if t.num_edges < 2 * t.n:
            col = colour_k13(t)
            assert sound(col, 3) and not col.meta["fallback"]


def test_graph_mode_examples():
    g = disjoint_union(K4, graph_from_name("bowtie"))
    assert sound(colour_graph_triangle_mode(g, 3), 3)

    free = graph_from_name("C7")
    col = colour_graph_triangle_mode(free, 3)
    assert len(col.colours()) == free.num_edges

    g = disjoint_union(K5, K4)
    with pytest.raises(DensityBoundError) as info:
        colour_graph_triangle_mode(g, 3)
    assert sorted(info.value.edges) == list(K5.edges)
    assert sound(colour_graph_triangle_mode(g, 4), 4)


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=10), st.sampled_from([3, 4]))
def test_graph_mode_is_sound(g, k):
    try:
        col = colour_graph_triangle_mode(g, k)
    except DensityBoundError as exc:
        verts = {x for e in exc.edges for x in e}
        assert len(exc.edges) >= 2 * len(verts) + (k == 4)
        return
    assert col.is_total and sound(col, k)
