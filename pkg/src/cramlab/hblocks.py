"""H-equivalence, H-closedness and H-block decomposition."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError
from .graph import CopySet, Edge, Graph, enumerate_copies, norm_edge


class CopyIndex:
    """Copies of a pattern in a host together with the edge -> copy-id lists."""

    def __init__(self, host: Graph, pattern: Graph, copies: list[CopySet] | None = None):
        self.host = host
        self.pattern = pattern
        self.copies: list[CopySet] = (
            enumerate_copies(pattern, host) if copies is None else list(copies)
        )
        per_edge: dict[Edge, list[int]] = {e: [] for e in host.edges}
        for cid, copy in enumerate(self.copies):
            for e in sorted(copy):
                per_edge[e].append(cid)
        self.per_edge = {e: tuple(ids) for e, ids in per_edge.items()}

    def copies_of(self, e: Edge) -> tuple[int, ...]:
        key = norm_edge(*e)
        if key not in self.per_edge:
            raise KeyError(f"edge {key} is not in the host graph")
        return self.per_edge[key]


def h_equivalent(e1: Edge, e2: Edge, index: CopyIndex) -> bool:
    return set(index.copies_of(e1)) == set(index.copies_of(e2))


@dataclass(frozen=True)
class ClosedStatus:
    closed_edges: frozenset[Edge]
    open_copies: tuple[int, ...]
    uncovered_vertices: tuple[int, ...]
    uncovered_edges: tuple[Edge, ...]
    is_closed: bool

    def to_json(self) -> dict:
        return {
            "closed_edges": [list(e) for e in sorted(self.closed_edges)],
            "open_copies": list(self.open_copies),
            "uncovered_vertices": list(self.uncovered_vertices),
            "uncovered_edges": [list(e) for e in self.uncovered_edges],
            "is_closed": self.is_closed,
        }


def closed_status(g: Graph, pattern: Graph, index: CopyIndex | None = None) -> ClosedStatus:
    index = index or CopyIndex(g, pattern)
    closed = frozenset(e for e, ids in index.per_edge.items() if len(ids) >= 2)
    open_copies = tuple(
        cid for cid, copy in enumerate(index.copies) if len(copy & closed) < 3
    )
    covered_vertices = {x for copy in index.copies for e in copy for x in e}
    uncovered_v = tuple(v for v in range(g.n) if v not in covered_vertices)
    uncovered_e = tuple(e for e, ids in index.per_edge.items() if not ids)
    return ClosedStatus(
        closed_edges=closed,
        open_copies=open_copies,
        uncovered_vertices=uncovered_v,
        uncovered_edges=uncovered_e,
        is_closed=not open_copies and not uncovered_v and not uncovered_e,
    )


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple[tuple[Edge, ...], ...]
    # copy ids grouped by block, parallel to ``blocks``
    block_copies: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"blocks": [[list(e) for e in b] for b in self.blocks]}


def overlap_components(index: CopyIndex) -> list[list[int]]:
    """Connected components of the graph on copies, adjacent when sharing an edge."""
    parent = list(range(len(index.copies)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for ids in index.per_edge.values():
        for other in ids[1:]:
            ra, rb = find(ids[0]), find(other)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for cid in range(len(index.copies)):
        groups.setdefault(find(cid), []).append(cid)
    return list(groups.values())


def block_decomposition(
    g: Graph, pattern: Graph, index: CopyIndex | None = None
) -> BlockDecomposition:
    """Split an H-closed graph into H-blocks (copy-overlap components)."""
    index = index or CopyIndex(g, pattern)
    status = closed_status(g, pattern, index)
    if not status.is_closed:
        raise PreconditionError(
            "graph is not closed for the pattern "
            f"({len(status.open_copies)} open copies, {len(status.uncovered_edges)} uncovered "
            f"edges, {len(status.uncovered_vertices)} uncovered vertices)"
        )
    comps = overlap_components(index)
    blocks = []
    for comp in comps:
        edges = sorted({e for cid in comp for e in index.copies[cid]})
        blocks.append((tuple(edges), tuple(sorted(comp))))
    blocks.sort()
    return BlockDecomposition(
        blocks=tuple(b for b, _ in blocks),
        block_copies=tuple(c for _, c in blocks),
    )
