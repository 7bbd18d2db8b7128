"""Simple undirected graphs, named constructors, edge-list I/O and copy enumeration.

Vertices are the integers ``0..n-1``.  Edges are stored as sorted pairs
``(u, v)`` with ``u < v`` and iterate in lexicographic order, so every
traversal in the package is deterministic.

A *copy* of a pattern inside a host is identified by its edge set: two
embeddings that differ by an automorphism of the pattern give the same copy.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from functools import cached_property

from .errors import GraphFormatError, UnknownGraphError

Edge = tuple[int, int]
CopySet = frozenset  # frozenset[Edge]


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple graph on vertices ``0..n-1``."""

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise GraphFormatError(f"vertex count must be nonnegative, got {n}")
        seen: set[Edge] = set()
        for pair in edges:
            u, v = int(pair[0]), int(pair[1])
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            e = norm_edge(u, v)
            if e in seen:
                raise GraphFormatError(f"duplicate edge {e}")
            seen.add(e)
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(sorted(seen))

    @classmethod
    def from_edge_set(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        """Like the constructor but tolerates repeated edges."""
        return cls(n, {norm_edge(int(a), int(b)) for a, b in edges})

    # -- basic structure -------------------------------------------------

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def adjmask(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adj)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    @property
    def min_degree(self) -> int:
        return min(self.degrees, default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def non_isolated(self) -> list[int]:
        return [v for v in range(self.n) if self.adj[v]]

    # -- derived graphs --------------------------------------------------

    def edge_subgraph(self, edges: Iterable[Edge]) -> Graph:
        """Spanning subgraph on the same vertex set."""
        return Graph(self.n, sorted(set(edges)))

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph relabelled to ``0..k-1``; returns (graph, old labels)."""
        old = sorted(set(vertices))
        new = {v: i for i, v in enumerate(old)}
        es = [(new[u], new[v]) for u, v in self.edges if u in new and v in new]
        return Graph(len(old), es), old

    def compact(self, edges: Iterable[Edge] | None = None) -> tuple[Graph, list[int]]:
        """Graph spanned by ``edges`` (default: all edges) with isolated vertices dropped."""
        es = self.edges if edges is None else sorted(set(edges))
        old = sorted({x for e in es for x in e})
        new = {v: i for i, v in enumerate(old)}
        return Graph(len(old), [(new[u], new[v]) for u, v in es]), old

    def relabel(self, perm: Sequence[int]) -> Graph:
        return Graph(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def with_edges(self, extra: Iterable[Edge]) -> Graph:
        return Graph.from_edge_set(self.n, list(self.edges) + list(extra))

    # -- dunder ----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={list(self.edges)})"


def disjoint_union(*graphs: Graph) -> Graph:
    edges: list[Edge] = []
    offset = 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return Graph(offset, edges)


# ---------------------------------------------------------------------------
# named constructors


def _complete(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def _cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def _path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def _star(k: int) -> Graph:
    return Graph(k + 1, [(0, i) for i in range(1, k + 1)])


def _book(t: int) -> Graph:
    # spine 0-1, pages 2..t+1
    edges = [(0, 1)]
    for p in range(2, t + 2):
        edges += [(0, p), (1, p)]
    return Graph(t + 2, edges)


def _blowup_cycle(m: int, k: int) -> Graph:
    # vertex i*k + a is copy a of cycle vertex i
    edges = []
    for i in range(m):
        j = (i + 1) % m
        for a in range(k):
            for b in range(k):
                edges.append((i * k + a, j * k + b))
    return Graph.from_edge_set(m * k, edges)


def _hypercube(d: int) -> Graph:
    n = 1 << d
    return Graph(n, [(v, v ^ (1 << b)) for v in range(n) for b in range(d) if v < v ^ (1 << b)])


def _petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def _k6_minus_triangle() -> Graph:
    # 1-based labels 1..6 with 13, 35, 15 missing -> 0-based 02, 24, 04
    missing = {(0, 2), (2, 4), (0, 4)}
    return Graph(6, [e for e in itertools.combinations(range(6), 2) if e not in missing])


def _minus_edge(n: int) -> Graph:
    # K_n without the edge (0, 1)
    return Graph(n, [e for e in itertools.combinations(range(n), 2) if e != (0, 1)])


def _bowtie() -> Graph:
    return Graph(5, [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)])


def _need(params: Sequence[int], count: int, name: str) -> None:
    if len(params) != count:
        raise UnknownGraphError(f"{name} takes {count} parameter(s), got {list(params)}")


def make_named(name: str, params: Sequence[int] = ()) -> Graph:
    """Construct a graph from a named family.

    Families: ``K [n]``, ``C [n]``, ``P [n]`` (path on n vertices),
    ``star [k]`` (K_{1,k}), ``book [t]``, ``blowup [m, k]`` (k-blow-up of C_m),
    ``Q [d]``, ``empty [n]``, and the parameterless ``Petersen``, ``bowtie``,
    ``K4-minus-edge``, ``K5-minus-edge`` and ``K6-minus-triangle``.
    """
    params = [int(p) for p in params]
    key = name.strip()
    if key == "K":
        _need(params, 1, key)
        if params[0] < 1:
            raise UnknownGraphError("K_n needs n >= 1")
        return _complete(params[0])
    if key == "C":
        _need(params, 1, key)
        if params[0] < 3:
            raise UnknownGraphError("C_n needs n >= 3")
        return _cycle(params[0])
    if key == "P":
        _need(params, 1, key)
        if params[0] < 1:
            raise UnknownGraphError("P_n needs n >= 1")
        return _path(params[0])
    if key == "star":
        _need(params, 1, key)
        if params[0] < 1:
            raise UnknownGraphError("K_{1,k} needs k >= 1")
        return _star(params[0])
    if key == "book":
        _need(params, 1, key)
        if params[0] < 1:
            raise UnknownGraphError("book B_t needs t >= 1")
        return _book(params[0])
    if key == "blowup":
        _need(params, 2, key)
        m, k = params
        if m < 3 or k < 1:
            raise UnknownGraphError("blow-up needs a cycle length >= 3 and k >= 1")
        return _blowup_cycle(m, k)
    if key == "Q":
        _need(params, 1, key)
        if params[0] < 1:
            raise UnknownGraphError("Q_d needs d >= 1")
        return _hypercube(params[0])
    if key == "empty":
        _need(params, 1, key)
        if params[0] < 0:
            raise UnknownGraphError("empty graph needs n >= 0")
        return Graph(params[0])
    fixed = {
        "Petersen": _petersen,
        "bowtie": _bowtie,
        "K4-minus-edge": lambda: _minus_edge(4),
        "K5-minus-edge": lambda: _minus_edge(5),
        "K6-minus-triangle": _k6_minus_triangle,
    }
    if key in fixed:
        _need(params, 0, key)
        return fixed[key]()
    raise UnknownGraphError(f"unknown graph family {name!r}")


_ALIASES = {
    "K5-": ("K5-minus-edge", []),
    "K5minus": ("K5-minus-edge", []),
    "K4-e": ("K4-minus-edge", []),
    "K4-": ("K4-minus-edge", []),
    "petersen": ("Petersen", []),
}


def graph_from_name(text: str) -> Graph:
    """Parse shorthand such as ``K5``, ``C7``, ``K1,3``, ``P3``, ``Q3``, ``book:3``,
    ``blowup:C8:2`` or any parameterless family name."""
    s = text.strip()
    if s in _ALIASES:
        name, params = _ALIASES[s]
        return make_named(name, params)
    if ":" in s:
        head, *rest = s.split(":")
        if head == "blowup" and len(rest) == 2 and rest[0].startswith("C"):
            return make_named("blowup", [int(rest[0][1:]), int(rest[1])])
        if head in ("book", "K", "C", "P", "Q", "star", "empty"):
            return make_named(head, [int(x) for x in rest])
        raise UnknownGraphError(f"cannot parse graph name {text!r}")
    if s.startswith("K1,"):
        try:
            return make_named("star", [int(s[3:])])
        except ValueError:
            raise UnknownGraphError(f"cannot parse graph name {text!r}") from None
    for prefix in ("K", "C", "P", "Q"):
        if s.startswith(prefix) and s[len(prefix):].isdigit():
            return make_named(prefix, [int(s[len(prefix):])])
    return make_named(s, [])


# ---------------------------------------------------------------------------
# edge-list text


def parse_graph(text: str) -> Graph:
    """Parse ``n <count>`` followed by one ``u v`` pair per line.

    Blank lines and ``#`` comments are ignored.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty input; expected a header line 'n <count>'")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n" or not head[1].isdigit():
        raise GraphFormatError(f"bad header line {lines[0]!r}; expected 'n <count>'")
    n = int(head[1])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise GraphFormatError(f"malformed edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph(n, edges)


def serialize_graph(g: Graph) -> str:
    out = [f"n {g.n}"]
    out += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# embeddings, copies and isomorphism


def _search_order(pattern: Graph, vertices: list[int]) -> list[int]:
    """Greedy order: each next vertex has the most already-placed neighbours."""
    remaining = set(vertices)
    order: list[int] = []
    placed: set[int] = set()
    while remaining:
        best = max(
            remaining,
            key=lambda x: (len(pattern.adj[x] & placed), pattern.degree(x), -x),
        )
        order.append(best)
        placed.add(best)
        remaining.remove(best)
    return order


def iter_embeddings(
    pattern: Graph,
    host: Graph,
    *,
    all_vertices: bool = False,
    exact_degrees: bool = False,
) -> Iterator[dict[int, int]]:
    """Yield injective edge-preserving maps pattern -> host.

    By default only non-isolated pattern vertices are mapped.
    """
    verts = list(range(pattern.n)) if all_vertices else pattern.non_isolated()
    if len(verts) > host.n:
        return
    order = _search_order(pattern, verts)
    back = [[y for y in order[:i] if y in pattern.adj[x]] for i, x in enumerate(order)]
    pdeg = pattern.degrees
    hdeg = host.degrees
    hadj = host.adj
    by_degree = sorted(range(host.n), key=lambda v: (-hdeg[v], v))
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def ok(x: int, h: int) -> bool:
        if h in used:
            return False
        return hdeg[h] == pdeg[x] if exact_degrees else hdeg[h] >= pdeg[x]

    def rec(i: int) -> Iterator[dict[int, int]]:
        if i == len(order):
            yield dict(mapping)
            return
        x = order[i]
        if back[i]:
            imgs = [mapping[y] for y in back[i]]
            cand = set(hadj[imgs[0]])
            for h in imgs[1:]:
                cand &= hadj[h]
            cands = sorted(cand)
        else:
            cands = by_degree
        for h in cands:
            if ok(x, h):
                mapping[x] = h
                used.add(h)
                yield from rec(i + 1)
                used.discard(h)
                del mapping[x]

    yield from rec(0)


def iter_copies(pattern: Graph, host: Graph) -> Iterator[CopySet]:
    """Yield each distinct copy (edge set) of ``pattern`` in ``host`` once."""
    if pattern.num_edges == 0:
        raise ValueError("pattern must have at least one edge")
    if pattern.num_edges > host.num_edges:
        return
    seen: set[frozenset[Edge]] = set()
    for phi in iter_embeddings(pattern, host):
        image = frozenset(norm_edge(phi[u], phi[v]) for u, v in pattern.edges)
        if image not in seen:
            seen.add(image)
            yield image


def enumerate_copies(pattern: Graph, host: Graph) -> list[CopySet]:
    """All copies of ``pattern`` in ``host``, sorted by their sorted edge lists."""
    return sorted(iter_copies(pattern, host), key=lambda c: sorted(c))


def find_copy(pattern: Graph, host: Graph) -> CopySet | None:
    return next(iter_copies(pattern, host), None)


def is_isomorphic(a: Graph, b: Graph) -> bool:
    if a.n != b.n or a.num_edges != b.num_edges:
        return False
    if sorted(a.degrees) != sorted(b.degrees):
        return False
    # a bijective edge-preserving map between graphs with equal edge counts
    # is an isomorphism
    return next(iter_embeddings(a, b, all_vertices=True, exact_degrees=True), None) is not None


def automorphism_count(g: Graph) -> int:
    return sum(1 for _ in iter_embeddings(g, g, all_vertices=True, exact_degrees=True))
