"""Triangle-connected graphs, triangle sequences and the two constructive
colourings avoiding a rainbow triangle.

A triangle sequence grows a triangle-connected graph one vertex at a time:
each new vertex closes a triangle on an edge already present and brings all
of its edges back into the current vertex set.  A step is *regular* when it
adds exactly two edges.  Summing ``deg - 2`` over the steps gives the excess
``r``; for a triangle start ``e = 3 + 2*ell + r`` and ``v = 3 + ell``, so
``r = e - 2v + 3`` whichever sequence is used.

``colour_k14`` and ``colour_k13`` follow the step-by-step case analysis for
(K_{1,4}, K_3) and (K_{1,3}, K_3).  Each case's structural assumption is
checked as the colouring is built; if a sequence breaks one, the next
candidate sequence is tried, and as a last resort the exhaustive search is
used and the result is flagged.  Every returned colouring has passed the
oracle.
"""

from __future__ import annotations

import itertools
import logging
import random
from collections.abc import Iterator
from dataclasses import dataclass
from functools import lru_cache

from .colouring import EdgeColouring, has_monochromatic_star, has_rainbow_copy
from .errors import ContractViolation, DensityBoundError, NoValidColouring, PreconditionError
from .graph import Edge, Graph, make_named, norm_edge
from .oracle import search_colouring

log = logging.getLogger(__name__)

K3 = make_named("K", [3])

DP_VERTEX_LIMIT = 16
SEQUENCE_CANDIDATES = 400
FALLBACK_BUDGET = 5_000_000
_INF = 10**9

START_EXCESS = {"triangle": 0, "K4": 1, "K5minus": 2}


# ---------------------------------------------------------------------------
# triangles and components


def triangles(g: Graph) -> list[tuple[int, int, int]]:
    out = []
    adj = g.adj
    for u, v in g.edges:
        for w in sorted(adj[u] & adj[v]):
            if w > v:
                out.append((u, v, w))
    return out


def triangle_components(g: Graph) -> list[tuple[Edge, ...]]:
    """Edge sets of the maximal triangle-connected subgraphs.

    Triangles sharing an edge are merged; edges in no triangle are left out.
    """
    parent: dict[Edge, Edge] = {}

    def find(x: Edge) -> Edge:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: Edge, b: Edge) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra

    for a, b, c in triangles(g):
        es = [(a, b), (a, c), (b, c)]
        for e in es:
            parent.setdefault(e, e)
        union(es[0], es[1])
        union(es[0], es[2])
    groups: dict[Edge, list[Edge]] = {}
    for e in parent:
        groups.setdefault(find(e), []).append(e)
    return sorted(tuple(sorted(es)) for es in groups.values())


def is_triangle_connected(t: Graph) -> bool:
    if t.num_edges == 0 or any(d == 0 for d in t.degrees):
        return False
    comps = triangle_components(t)
    return len(comps) == 1 and len(comps[0]) == t.num_edges


def _require_tc(t: Graph) -> None:
    if not is_triangle_connected(t):
        raise PreconditionError("graph is not triangle-connected")


def r_value(t: Graph) -> int:
    """Excess ``e - 2v + 3`` of a triangle-connected graph."""
    _require_tc(t)
    return t.num_edges - 2 * t.n + 3


# ---------------------------------------------------------------------------
# sequences


@dataclass(frozen=True)
class Step:
    vertex: int
    anchor: Edge
    added: tuple[Edge, ...]

    @property
    def degree(self) -> int:
        return len(self.added)

    @property
    def regular(self) -> bool:
        return len(self.added) == 2


@dataclass(frozen=True)
class TriangleSequence:
    start_kind: str
    start: tuple[int, ...]
    steps: tuple[Step, ...]

    @property
    def ell(self) -> int:
        return len(self.steps)

    @property
    def r(self) -> int:
        return sum(s.degree - 2 for s in self.steps)

    @property
    def order(self) -> list[int]:
        return list(self.start) + [s.vertex for s in self.steps]

    def irregular_steps(self) -> list[int]:
        return [i for i, s in enumerate(self.steps, 1) if not s.regular]

    def to_json(self) -> dict:
        return {
            "start_kind": self.start_kind,
            "start": list(self.start),
            "steps": [
                {"vertex": s.vertex, "anchor": list(s.anchor), "added": [list(e) for e in s.added]}
                for s in self.steps
            ],
            "ell": self.ell,
            "r": self.r,
        }


def check_sequence(t: Graph, seq: TriangleSequence) -> None:
    """Raise :class:`ContractViolation` unless ``seq`` is a valid sequence for ``t``."""
    inside = set(seq.start)
    sub = _induced_edges(t, inside)
    expected = {"triangle": (3, 3), "K4": (4, 6), "K5minus": (5, 9)}[seq.start_kind]
    if (len(inside), len(sub)) != expected:
        raise ContractViolation(f"start does not induce a {seq.start_kind}")
    total = len(sub)
    for s in seq.steps:
        if s.vertex in inside:
            raise ContractViolation(f"vertex {s.vertex} added twice")
        a, b = s.anchor
        if not (a in inside and b in inside and t.has_edge(a, b)):
            raise ContractViolation(f"anchor {s.anchor} is not an edge of the current graph")
        if not (t.has_edge(s.vertex, a) and t.has_edge(s.vertex, b)):
            raise ContractViolation("new vertex does not close a triangle on its anchor")
        back = tuple(sorted(norm_edge(s.vertex, x) for x in t.adj[s.vertex] if x in inside))
        if back != tuple(sorted(s.added)):
            raise ContractViolation("added edges are not all edges back into the current graph")
        inside.add(s.vertex)
        total += len(s.added)
    if len(inside) != t.n or total != t.num_edges:
        raise ContractViolation("sequence does not cover the graph")


def _induced_edges(t: Graph, verts: set[int]) -> list[Edge]:
    return [e for e in t.edges if e[0] in verts and e[1] in verts]


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _mask(vs) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def _starts(t: Graph, rich: bool) -> tuple[str, list[tuple[int, ...]]]:
    tris = triangles(t)
    if rich:
        k5m = [
            s
            for s in itertools.combinations(range(t.n), 5)
            if len(_induced_edges(t, set(s))) == 9
        ] if t.n <= 40 else []
        if k5m:
            return "K5minus", k5m
        k4 = [
            s
            for s in itertools.combinations(range(t.n), 4)
            if len(_induced_edges(t, set(s))) == 6
        ] if t.n <= 60 else []
        if k4:
            return "K4", k4
    return "triangle", tris


def _anchor(t: Graph, v: int, mask: int) -> Edge | None:
    nb = t.adjmask[v] & mask
    x = nb
    while x:
        a = (x & -x).bit_length() - 1
        other = t.adjmask[a] & nb
        if other:
            b = (other & -other).bit_length() - 1
            return norm_edge(a, b)
        x &= x - 1
    return None


def _eligible(t: Graph, mask: int) -> list[int]:
    return [v for v in range(t.n) if not mask >> v & 1 and _anchor(t, v, mask) is not None]


def _make_step(t: Graph, v: int, mask: int) -> Step:
    anchor = _anchor(t, v, mask)
    added = tuple(sorted(norm_edge(v, x) for x in t.adj[v] if mask >> x & 1))
    return Step(v, anchor, added)


def _event_key(preference: str, idx: int, deg: int) -> tuple[int, tuple[int, ...]]:
    """Contribution of one step to a sequence's ranking key."""
    if deg == 2:
        return 0, ()
    if preference == "early":
        return 0, (idx,)
    if preference == "late":
        return 0, (-idx,)
    if preference == "k13":
        return (1 if deg >= 4 else 0), (-idx,)
    raise ValueError(f"unknown preference {preference!r}")


def _end_key(preference: str) -> tuple[int, ...]:
    return (_INF,) if preference == "early" else (-_INF,)


def _optimal_from(t: Graph, start: tuple[int, ...], preference: str) -> tuple[tuple, list[int]]:
    """Exact best ranking key over all sequences from ``start`` (subset DP)."""
    full = (1 << t.n) - 1
    base = len(start)

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[tuple, int]:
        if mask == full:
            return (0, _end_key(preference)), -1
        idx = _popcount(mask) - base + 1
        choice = None
        for v in _eligible(t, mask):
            deg = _popcount(t.adjmask[v] & mask)
            cnt, ev = _event_key(preference, idx, deg)
            (sub_cnt, sub_tup), _ = best(mask | 1 << v)
            key = (cnt + sub_cnt, ev + sub_tup)
            if choice is None or key < choice[0]:
                choice = (key, v)
        if choice is None:
            raise PreconditionError("graph is not triangle-connected")
        return choice

    mask = _mask(start)
    key = best(mask)[0]
    order = []
    while mask != full:
        _, v = best(mask)
        order.append(v)
        mask |= 1 << v
    return key, order


def _greedy_from(t: Graph, start: tuple[int, ...], preference: str) -> list[int]:
    full = (1 << t.n) - 1
    mask = _mask(start)
    order = []
    while mask != full:
        el = _eligible(t, mask)
        if not el:
            raise PreconditionError("graph is not triangle-connected")
        degs = {v: _popcount(t.adjmask[v] & mask) for v in el}
        if preference == "early":
            v = max(el, key=lambda x: (degs[x] > 2, -x))
        else:
            v = min(el, key=lambda x: (degs[x], x))
        order.append(v)
        mask |= 1 << v
    return order


def _sequence_from_order(t: Graph, kind: str, start: tuple[int, ...], order: list[int]) -> TriangleSequence:
    mask = _mask(start)
    steps = []
    for v in order:
        steps.append(_make_step(t, v, mask))
        mask |= 1 << v
    return TriangleSequence(kind, tuple(start), tuple(steps))


def build_sequence(
    t: Graph, allow_rich_starts: bool = False, preference: str = "late"
) -> TriangleSequence:
    """A triangle sequence covering ``t``.

    ``preference`` ranks sequences: ``"late"`` takes regular steps first and
    defers irregular ones, ``"early"`` puts irregular steps as early as
    possible, ``"k13"`` first minimises steps adding four or more edges.
    With ``allow_rich_starts`` the start is a K5 minus an edge if one exists,
    else a K4, else a triangle.
    """
    _require_tc(t)
    return next(candidate_sequences(t, allow_rich_starts, preference, limit=1))


def candidate_sequences(
    t: Graph, allow_rich_starts: bool, preference: str, limit: int = SEQUENCE_CANDIDATES
) -> Iterator[TriangleSequence]:
    """Sequences for ``t``: the best-ranked first, then others by DFS."""
    kind, starts = _starts(t, allow_rich_starts)
    if t.n <= DP_VERTEX_LIMIT:
        ranked = sorted(
            (_optimal_from(t, s, preference) + (s,) for s in starts),
            key=lambda x: (x[0], x[2]),
        )
        first = [(s, order) for _, order, s in ranked]
    else:
        first = [(s, _greedy_from(t, s, preference)) for s in starts[:1]]
    produced = 0
    seen: set[tuple] = set()
    for s, order in first:
        key = (s, tuple(order))
        if key in seen:
            continue
        seen.add(key)
        yield _sequence_from_order(t, kind, s, order)
        produced += 1
        if produced >= limit:
            return
    full = (1 << t.n) - 1
    for s in starts:

        def dfs(mask: int, order: list[int]) -> Iterator[list[int]]:
            if mask == full:
                yield list(order)
                return
            for v in _eligible(t, mask):
                order.append(v)
                yield from dfs(mask | 1 << v, order)
                order.pop()

        for order in dfs(_mask(s), []):
            key = (s, tuple(order))
            if key in seen:
                continue
            seen.add(key)
            yield _sequence_from_order(t, kind, s, order)
            produced += 1
            if produced >= limit:
                return


def random_sequence(t: Graph, rng: random.Random) -> TriangleSequence:
    """Uniformly random start triangle, then uniformly random eligible vertices."""
    _require_tc(t)
    start = rng.choice(triangles(t))
    full = (1 << t.n) - 1
    mask = _mask(start)
    order = []
    while mask != full:
        v = rng.choice(_eligible(t, mask))
        order.append(v)
        mask |= 1 << v
    return _sequence_from_order(t, "triangle", start, order)


# ---------------------------------------------------------------------------
# (K_{1,4}, K_3)


def _k14_along(t: Graph, seq: TriangleSequence) -> dict[Edge, int] | None:
    phi: dict[Edge, int] = {}
    pos = {v: i for i, v in enumerate(seq.order)}
    step_of = {s.vertex: i for i, s in enumerate(seq.steps, 1)}
    a, b, c = seq.start
    phi[norm_edge(a, b)] = 0
    phi[norm_edge(a, c)] = 0
    for i, step in enumerate(seq.steps, 1):
        v = step.vertex
        nbrs = [x for e in step.added for x in e if x != v]
        nset = set(nbrs)
        big_u = [x for x in nbrs if t.adj[x] & nset]
        if len(big_u) <= 3:
            for x in nbrs if len(nbrs) <= 3 else big_u:
                phi[norm_edge(v, x)] = i
            continue
        if len(big_u) != 4:
            return None
        u = max(big_u, key=pos.__getitem__)
        j = step_of.get(u)
        if j is None:
            return None
        cls = [e for e, col in phi.items() if col == j]
        if len(cls) != 3 or not all(u in e for e in cls):
            return None
        rest = [x for x in big_u if x != u]
        if any(t.has_edge(u, x) and phi.get(norm_edge(u, x)) != j for x in rest):
            return None
        for x in rest:
            phi[norm_edge(v, x)] = j
    fresh = seq.ell + 1
    for e in t.edges:
        if e not in phi:
            phi[e] = fresh
            fresh += 1
    return phi


def _oracle_ok(col: EdgeColouring, k: int) -> bool:
    return not has_monochromatic_star(col, k) and not has_rainbow_copy(col, K3)


def _fallback(t: Graph, k: int, reason: str) -> EdgeColouring:
    log.warning("structured (K1,%d, K3) colouring fell back to search: %s", k, reason)
    found, explored = search_colouring(t, K3, k, budget=FALLBACK_BUDGET)
    if found is None:
        raise NoValidColouring(
            f"no colouring avoids a monochromatic K1,{k} and a rainbow triangle",
            edges=list(t.edges),
            explored=explored,
        )
    found.meta.update({"fallback": True, "reason": reason})
    return found


def colour_k14(t: Graph) -> EdgeColouring:
    """Colouring of a triangle-connected graph with ``e <= 2v`` that has no
    monochromatic K_{1,4} and no rainbow triangle."""
    _require_tc(t)
    if t.num_edges > 2 * t.n:
        raise DensityBoundError(
            f"needs e <= 2v, got e={t.num_edges}, v={t.n}", edges=list(t.edges)
        )
    for rank, seq in enumerate(candidate_sequences(t, False, "early")):
        phi = _k14_along(t, seq)
        if phi is None:
            continue
        col = EdgeColouring(t, phi, meta={"fallback": False, "sequence_rank": rank})
        if _oracle_ok(col, 4):
            col.meta["sequence"] = seq.to_json()
            return col
    return _fallback(t, 4, "no candidate sequence satisfied the case analysis")


# ---------------------------------------------------------------------------
# (K_{1,3}, K_3)


class _PairColouring:
    """Colour pairs ``(step, j)`` with per-colour edge classes."""

    def __init__(self, t: Graph):
        self.t = t
        self.col: dict[Edge, tuple[int, int]] = {}
        self.classes: dict[tuple[int, int], set[Edge]] = {}

    def get(self, u: int, v: int) -> tuple[int, int]:
        return self.col[norm_edge(u, v)]

    def put(self, u: int, v: int, c: tuple[int, int]) -> None:
        e = norm_edge(u, v)
        self.col[e] = c
        self.classes.setdefault(c, set()).add(e)

    def remove(self, u: int, v: int) -> None:
        e = norm_edge(u, v)
        c = self.col.pop(e)
        self.classes[c].discard(e)

    def star(self, x: int, c: tuple[int, int]) -> int:
        return sum(1 for e in self.classes.get(c, ()) if x in e)

    def others_at(self, x: int, c: tuple[int, int], exclude: Edge) -> bool:
        """Whether ``x`` meets an edge of colour ``c`` other than ``exclude``."""
        return any(x in e and e != exclude for e in self.classes.get(c, ()))

    def class_is_short_path(self, c: tuple[int, int]) -> bool:
        es = list(self.classes.get(c, ()))
        if len(es) <= 1:
            return True
        return len(es) == 2 and bool(set(es[0]) & set(es[1]))

    def try_assign(self, v: int, nbrs: list[int], plan: dict[int, tuple[int, int]]) -> bool:
        """Apply ``plan`` (neighbour -> colour) if the local invariants survive."""
        for x, c in plan.items():
            self.put(v, x, c)
        ok = all(self.star(y, c) <= 2 for y in [v, *plan] for c in set(plan.values()))
        if ok:
            nset = set(nbrs)
            for x in nbrs:
                for y in self.t.adj[x] & nset:
                    if x < y:
                        cs = {self.get(v, x), self.get(v, y), self.get(x, y)}
                        if len(cs) == 3:
                            ok = False
                            break
                if not ok:
                    break
        if not ok:
            for x in plan:
                self.remove(v, x)
        return ok


def _k13_start(pc: _PairColouring, t: Graph, seq: TriangleSequence) -> None:
    s = seq.start
    if seq.start_kind == "triangle":
        a, b, c = s
        pc.put(a, b, (0, 0))
        pc.put(a, c, (0, 0))
        pc.put(b, c, (0, 1))
    elif seq.start_kind == "K4":
        a, b, c, d = s
        for x, y in ((a, b), (b, c), (c, d), (d, a)):
            pc.put(x, y, (0, 0))
        pc.put(a, c, (0, 1))
        pc.put(b, d, (0, 2))
    else:
        x, y = next((p, q) for p, q in itertools.combinations(s, 2) if not t.has_edge(p, q))
        a, b, c = (w for w in s if w not in (x, y))
        cycle = [(x, a), (a, y), (y, b), (b, c), (c, x)]
        for p, q in cycle:
            pc.put(p, q, (0, 0))
        for p, q in itertools.combinations(s, 2):
            if t.has_edge(p, q) and norm_edge(p, q) not in pc.col:
                pc.put(p, q, (0, 1))


def _k13_plans(pc: _PairColouring, t: Graph, v: int, nbrs: list[int], i: int, pos, irregular_before: int):
    """Candidate colourings of the new edges, in case-analysis order."""
    new0, new1 = (i, 0), (i, 1)
    if len(nbrs) == 2:
        yield {nbrs[0]: new0, nbrs[1]: new0}
        return
    nset = set(nbrs)
    inner = [(x, y) for x, y in itertools.combinations(nbrs, 2) if t.has_edge(x, y)]
    if len(nbrs) == 3:
        if len(inner) == 1:
            u1, u2 = inner[0]
            (u3,) = nset - {u1, u2}
            yield {u1: new0, u2: new0, u3: new1}
        elif len(inner) == 3:
            for u2 in nbrs:
                u1, u3 = (x for x in nbrs if x != u2)
                if pc.get(u1, u2) == pc.get(u2, u3):
                    c1 = pc.get(u1, u2)
                    yield {u1: c1, u3: c1, u2: new0}
        else:
            u2 = next(x for x in nbrs if len(t.adj[x] & nset) == 2)
            ends = [x for x in nbrs if x != u2]
            ca, cb = pc.get(ends[0], u2), pc.get(ends[1], u2)
            if ca == cb:
                c1 = ca
                for u1 in ends:
                    u3 = ends[0] if u1 == ends[1] else ends[1]
                    if not pc.others_at(u1, c1, norm_edge(u1, u2)):
                        yield {u1: c1, u2: new0, u3: new0}
            else:
                for u1 in ends:
                    u3 = ends[0] if u1 == ends[1] else ends[1]
                    c1 = pc.get(u1, u2)
                    if not pc.class_is_short_path(c1):
                        continue
                    if not pc.others_at(u1, c1, norm_edge(u1, u2)):
                        yield {u1: c1, u2: new0, u3: new0}
                    else:
                        yield {u1: new0, u2: c1, u3: c1}
        return
    if len(nbrs) == 4:
        u4 = max(nbrs, key=pos.__getitem__)
        rest = [x for x in nbrs if x != u4]
        if any(t.has_edge(x, y) for x, y in itertools.combinations(rest, 2)):
            return
        linked = [x for x in rest if t.has_edge(x, u4)]
        if len(linked) != 1:
            return
        u3 = linked[0]
        u1, u2 = (x for x in rest if x != u3)
        yield {u1: new0, u2: new0, u3: new1, u4: new1}


def _k13_along(t: Graph, seq: TriangleSequence) -> dict[Edge, tuple[int, int]] | None:
    pc = _PairColouring(t)
    _k13_start(pc, t, seq)
    pos = {v: i for i, v in enumerate(seq.order)}
    irregular = 0
    for i, step in enumerate(seq.steps, 1):
        v = step.vertex
        nbrs = sorted((x for e in step.added for x in e if x != v), key=pos.__getitem__)
        done = False
        for plan in _k13_plans(pc, t, v, nbrs, i, pos, irregular):
            if pc.try_assign(v, nbrs, plan):
                done = True
                break
        if not done:
            return None
        if not step.regular:
            irregular += 1
    return dict(pc.col)


def colour_k13(t: Graph) -> EdgeColouring:
    """Colouring of a triangle-connected graph with ``e < 2v`` that has no
    monochromatic K_{1,3} and no rainbow triangle.

    Colour pairs ``(i, j)`` are flattened to ``3*i + j``; the pair form is
    kept in ``meta["pairs"]``.
    """
    _require_tc(t)
    if t.num_edges >= 2 * t.n:
        raise DensityBoundError(
            f"needs e < 2v, got e={t.num_edges}, v={t.n}", edges=list(t.edges)
        )
    for rank, seq in enumerate(candidate_sequences(t, True, "k13")):
        pairs = _k13_along(t, seq)
        if pairs is None:
            continue
        flat = {e: 3 * i + j for e, (i, j) in pairs.items()}
        col = EdgeColouring(t, flat, meta={"fallback": False, "sequence_rank": rank})
        if _oracle_ok(col, 3):
            col.meta["pairs"] = {f"{u}-{v}": list(p) for (u, v), p in sorted(pairs.items())}
            col.meta["sequence"] = seq.to_json()
            return col
    return _fallback(t, 3, "no candidate sequence satisfied the case analysis")


# ---------------------------------------------------------------------------
# whole graphs


def colour_graph_triangle_mode(g: Graph, k: int) -> EdgeColouring:
    """Colour every triangle component with disjoint palettes and every other
    edge with its own colour.

    Raises :class:`DensityBoundError` carrying the first component that is
    too dense (``e > 2v`` for ``k = 4``, ``e >= 2v`` for ``k = 3``).
    """
    if k not in (3, 4):
        raise PreconditionError("k must be 3 or 4")
    comps = triangle_components(g)
    for comp in comps:
        v = len({x for e in comp for x in e})
        e = len(comp)
        if (k == 4 and e > 2 * v) or (k == 3 and e >= 2 * v):
            raise DensityBoundError(
                f"triangle component with e={e}, v={v} violates the bound for k={k}",
                edges=list(comp),
            )
    colour_fn = colour_k14 if k == 4 else colour_k13
    assignment: dict[Edge, int] = {}
    nxt = 0
    fallbacks = 0
    for comp in comps:
        sub, labels = g.compact(comp)
        col = colour_fn(sub)
        fallbacks += bool(col.meta.get("fallback"))
        used = sorted(col.colours())
        remap = {c: nxt + i for i, c in enumerate(used)}
        nxt += len(used)
        for (a, b), c in col.assignment.items():
            assignment[norm_edge(labels[a], labels[b])] = remap[c]
    for e in g.edges:
        if e not in assignment:
            assignment[e] = nxt
            nxt += 1
    return EdgeColouring(
        g, assignment, meta={"components": len(comps), "fallbacks": fallbacks}
    )
