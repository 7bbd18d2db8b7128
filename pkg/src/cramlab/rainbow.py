"""Reduction colourings for anti-Ramsey and constrained-Ramsey patterns.

Both algorithms peel the host in two loops before any search happens:

1. repeatedly take the lexicographically smallest pair of H-equivalent edges
   (vertex-disjoint for the anti-Ramsey variant) and give both one fresh
   colour;
2. give every edge that lies in no remaining copy its own fresh colour.

What is left, with isolated vertices dropped, must be H-closed; it splits
into H-blocks which are coloured independently with disjoint palettes.
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from functools import lru_cache

from .colouring import EdgeColouring, has_monochromatic_star, has_rainbow_copy, is_proper
from .density import d2, is_strictly_2_balanced
from .errors import BudgetExhausted, ContractViolation, NoValidColouring, PreconditionError
from .graph import Edge, Graph, enumerate_copies, is_isomorphic, make_named, norm_edge
from .hblocks import CopyIndex, block_decomposition, closed_status
from .oracle import ColouringSearch

log = logging.getLogger(__name__)

DEFAULT_BLOCK_BUDGET = 2_000_000
EXACT_INDEX_BUDGET = 20_000

_K3 = make_named("K", [3])
_C4 = make_named("C", [4])


# ---------------------------------------------------------------------------
# Vizing colouring (Misra-Gries fan rotation)


def vizing_colouring(g: Graph) -> EdgeColouring:
    """Proper edge colouring with at most ``max_degree + 1`` colours."""
    if g.num_edges < 1:
        raise PreconditionError("vizing_colouring needs at least one edge")
    palette = g.max_degree + 1
    col: dict[Edge, int] = {}
    at: list[dict[int, int]] = [dict() for _ in range(g.n)]

    def put(u: int, v: int, c: int) -> None:
        col[norm_edge(u, v)] = c
        at[u][c] = v
        at[v][c] = u

    def clear(u: int, v: int) -> None:
        c = col.pop(norm_edge(u, v))
        del at[u][c]
        del at[v][c]

    def free(v: int) -> int:
        for c in range(palette):
            if c not in at[v]:
                return c
        raise ContractViolation(f"no free colour at vertex {v}")

    def is_fan(u: int, fan: list[int]) -> bool:
        if norm_edge(u, fan[0]) in col:
            return False
        for i in range(1, len(fan)):
            c = col.get(norm_edge(u, fan[i]))
            if c is None or c in at[fan[i - 1]]:
                return False
        return True

    for u, v in g.edges:
        fan = [v]
        in_fan = {v}
        grown = True
        while grown:
            grown = False
            last = fan[-1]
            for w in sorted(g.adj[u]):
                if w in in_fan:
                    continue
                c = col.get(norm_edge(u, w))
                if c is not None and c not in at[last]:
                    fan.append(w)
                    in_fan.add(w)
                    grown = True
                    break
        c = free(u)
        d = free(fan[-1])
        if c != d:
            # invert the c/d alternating path leaving u along d
            path = []
            x, want = u, d
            while want in at[x]:
                y = at[x][want]
                path.append((x, y, want))
                x, want = y, (c if want == d else d)
            for x, y, _ in path:
                clear(x, y)
            for x, y, cc in path:
                put(x, y, c if cc == d else d)
        for j, w in enumerate(fan):
            if d not in at[w] and is_fan(u, fan[: j + 1]):
                break
        else:
            raise ContractViolation("fan rotation found no endpoint")
        shifted = [col[norm_edge(u, fan[i + 1])] for i in range(j)]
        for i in range(1, j + 1):
            clear(u, fan[i])
        for i in range(j):
            put(u, fan[i], shifted[i])
        put(u, fan[j], d)
    return EdgeColouring(g, col)


# ---------------------------------------------------------------------------
# per-block colouring


@dataclass
class BlockOutcome:
    status: str  # "found" | "none" | "exhausted"
    colouring: EdgeColouring | None
    explored: int
    method: str = "search"


def block_colour_search(
    block: Graph, pattern: Graph, mode: str = "aram", k: int = 3, budget: int | None = None
) -> BlockOutcome:
    """Search for a block colouring with no rainbow pattern copy.

    ``mode="aram"`` additionally asks for a proper colouring; ``mode="cram"``
    forbids a monochromatic K_{1,k}.
    """
    if mode not in ("aram", "cram"):
        raise ValueError(f"unknown mode {mode!r}")
    star = 2 if mode == "aram" else k
    engine = ColouringSearch(block, pattern, star)
    res = engine.run(budget=budget)
    colouring = engine.to_colouring(res.colours) if res.status == "found" else None
    return BlockOutcome(res.status, colouring, res.explored)


def c4_block_colouring(block: Graph) -> EdgeColouring | None:
    """Colouring with no monochromatic K_{1,3} and no rainbow C4.

    Peels vertices of degree at most two (each gets one fresh colour on its
    remaining edges).  The core is edge-coloured with max-degree colours when
    a short search finds such a colouring, otherwise with Vizing, merging the
    fourth colour into the third.  Returns ``None`` if the core has a vertex of
    degree above three, where the merge argument does not apply.
    """
    alive = set(block.edges)
    deg = list(block.degrees)
    peeled: list[tuple[int, list[Edge]]] = []
    active = {v for v in range(block.n) if deg[v] > 0}
    while True:
        low = sorted(v for v in active if deg[v] <= 2)
        if not low:
            break
        v = low[0]
        es = [e for e in alive if v in e]
        for e in es:
            alive.discard(e)
            w = e[0] if e[1] == v else e[1]
            deg[w] -= 1
            if deg[w] == 0:
                active.discard(w)
        deg[v] = 0
        active.discard(v)
        peeled.append((v, sorted(es)))
    col: dict[Edge, int] = {}
    nxt = 0
    if alive:
        core = Graph(block.n, sorted(alive))
        if core.max_degree > 3:
            return None
        # chromatic index is max degree or one more; try the former exactly
        exact = ColouringSearch(core, None, 2, max_colours=core.max_degree).run(
            budget=EXACT_INDEX_BUDGET
        )
        if exact.status == "found":
            for e, c in zip(core.edges, exact.colours):
                col[e] = c
        else:
            for e, c in vizing_colouring(core).assignment.items():
                col[e] = 2 if c == 3 else c
        nxt = 3
    for _, es in reversed(peeled):
        for e in es:
            col[e] = nxt
        nxt += 1
    return EdgeColouring(block, col, meta={"method": "vizing"})


# ---------------------------------------------------------------------------
# the two reduction algorithms


@dataclass
class ColouringTrace:
    host: Graph
    paired_edges: list[tuple[Edge, Edge, int]] = field(default_factory=list)
    solo_edges: list[tuple[Edge, int]] = field(default_factory=list)
    block_colourings: list[EdgeColouring] = field(default_factory=list)
    block_methods: list[str] = field(default_factory=list)

    @property
    def colouring(self) -> EdgeColouring:
        assignment: dict[Edge, int] = {}
        for e1, e2, c in self.paired_edges:
            assignment[e1] = c
            assignment[e2] = c
        for e, c in self.solo_edges:
            assignment[e] = c
        for bc in self.block_colourings:
            assignment.update(bc.assignment)
        return EdgeColouring(self.host, assignment)

    def to_json(self) -> dict:
        return {
            "n": self.host.n,
            "paired_edges": [[list(a), list(b), c] for a, b, c in self.paired_edges],
            "solo_edges": [[list(e), c] for e, c in self.solo_edges],
            "block_colourings": [
                {
                    "method": method,
                    "colouring": [[u, v, c] for (u, v), c in sorted(bc.assignment.items())],
                }
                for bc, method in zip(self.block_colourings, self.block_methods)
            ],
        }


@lru_cache(maxsize=64)
def _pattern_ok(pattern: Graph) -> tuple[bool, bool]:
    """(strictly 2-balanced, m2 > 1) for a pattern."""
    if pattern.n < 3 or pattern.num_edges < 1:
        return False, False
    return is_strictly_2_balanced(pattern), d2(pattern.num_edges, pattern.n) > 1


def _disjoint(a: Edge, b: Edge) -> bool:
    return a[0] not in b and a[1] not in b


def _min_pair(edges: list[Edge], disjoint: bool) -> tuple[Edge, Edge] | None:
    if not disjoint:
        return (edges[0], edges[1]) if len(edges) >= 2 else None
    for i, a in enumerate(edges):
        for b in edges[i + 1:]:
            if _disjoint(a, b):
                return a, b
    return None


def _peel(g: Graph, pattern: Graph, disjoint: bool, trace: ColouringTrace) -> tuple[set[Edge], int]:
    """Run both while-loops; returns the residual edge set and the next colour."""
    copies = enumerate_copies(pattern, g)
    alive = [True] * len(copies)
    containing: dict[Edge, set[int]] = {e: set() for e in g.edges}
    for cid, copy in enumerate(copies):
        for e in copy:
            containing[e].add(cid)
    sig: dict[Edge, frozenset[int]] = {e: frozenset(ids) for e, ids in containing.items()}
    classes: dict[frozenset[int], list[Edge]] = {}
    for e in g.edges:
        classes.setdefault(sig[e], []).append(e)
    remaining = set(g.edges)
    col = 0

    def drop(e: Edge) -> None:
        lst = classes[sig[e]]
        del lst[bisect.bisect_left(lst, e)]
        if not lst:
            del classes[sig[e]]

    while True:
        best = None
        for key, lst in classes.items():
            # copy-free edges are left to the second loop
            if not key:
                continue
            pair = _min_pair(lst, disjoint)
            if pair is not None and (best is None or pair < best):
                best = pair
        if best is None:
            break
        e1, e2 = best
        trace.paired_edges.append((e1, e2, col))
        col += 1
        killed = set(sig[e1]) | set(sig[e2])
        for e in (e1, e2):
            drop(e)
            remaining.discard(e)
            del sig[e]
        touched: set[Edge] = set()
        for cid in killed:
            if alive[cid]:
                alive[cid] = False
                touched.update(x for x in copies[cid] if x in remaining)
        for e in sorted(touched):
            drop(e)
            sig[e] = frozenset(c for c in sig[e] if alive[c])
            bisect.insort(classes.setdefault(sig[e], []), e)

    for e in sorted(remaining):
        if not sig[e]:
            trace.solo_edges.append((e, col))
            col += 1
    remaining = {e for e in remaining if sig[e]}
    return remaining, col


def _colour_blocks(
    g: Graph,
    pattern: Graph,
    residue: set[Edge],
    col: int,
    mode: str,
    k: int,
    budget: int | None,
    trace: ColouringTrace,
) -> None:
    if not residue:
        return
    compact, labels = g.compact(residue)
    index = CopyIndex(compact, pattern)
    status = closed_status(compact, pattern, index)
    if not status.is_closed:
        raise ContractViolation(
            "residual graph after peeling is not closed for the pattern "
            f"(open copies: {len(status.open_copies)})"
        )
    decomposition = block_decomposition(compact, pattern, index)
    use_c4 = mode == "cram" and k >= 3 and is_isomorphic(pattern, _C4)
    for block_edges in decomposition.blocks:
        host_edges = [norm_edge(labels[u], labels[v]) for u, v in block_edges]
        block, block_labels = g.compact(host_edges)
        colouring, method = None, "search"
        if use_c4:
            colouring = c4_block_colouring(block)
            if colouring is not None and (
                has_monochromatic_star(colouring, 3) or has_rainbow_copy(colouring, pattern)
            ):
                log.warning("vizing route failed the oracle on a C4 block; searching instead")
                colouring = None
            if colouring is not None:
                method = "vizing"
        if colouring is None:
            out = block_colour_search(block, pattern, mode=mode, k=k, budget=budget)
            if out.status == "exhausted":
                raise BudgetExhausted(
                    f"block with {block.num_edges} edges exhausted the search budget",
                    out.explored,
                    edges=host_edges,
                )
            if out.status == "none":
                raise NoValidColouring(
                    f"block with {block.num_edges} edges admits no valid colouring",
                    edges=sorted(host_edges),
                    explored=out.explored,
                )
            colouring = out.colouring
        used = sorted(colouring.colours())
        remap = {c: col + i for i, c in enumerate(used)}
        col += len(used)
        assignment = {
            norm_edge(block_labels[u], block_labels[v]): remap[c]
            for (u, v), c in colouring.assignment.items()
        }
        trace.block_colourings.append(EdgeColouring(g, assignment))
        trace.block_methods.append(method)


def rainbow_colour(
    g: Graph, pattern: Graph, block_budget: int | None = DEFAULT_BLOCK_BUDGET
) -> ColouringTrace:
    """Proper colouring of ``g`` with no rainbow copy of ``pattern``.

    The pattern must be strictly 2-balanced with at least five edges and
    ``m2 > 1``.  Raises :class:`NoValidColouring` with the offending block if
    some block cannot be coloured, and :class:`BudgetExhausted` if a block
    search runs out of nodes.
    """
    strict, dense = _pattern_ok(pattern)
    if not (strict and dense and pattern.num_edges >= 5):
        raise PreconditionError(
            "pattern must be strictly 2-balanced with at least five edges and m2 > 1"
        )
    if block_budget is not None and block_budget <= 0:
        raise PreconditionError("block budget must be positive")
    trace = ColouringTrace(g)
    residue, col = _peel(g, pattern, disjoint=True, trace=trace)
    _colour_blocks(g, pattern, residue, col, "aram", 2, block_budget, trace)
    return trace


def rainbow_colour_constrained(
    g: Graph, pattern: Graph, k: int = 3, block_budget: int | None = DEFAULT_BLOCK_BUDGET
) -> ColouringTrace:
    """Colouring of ``g`` with no monochromatic K_{1,k} and no rainbow ``pattern``.

    The pattern must be strictly 2-balanced with ``m2 > 1`` and not a
    triangle.  C4 blocks go through the Vizing route first.
    """
    if k < 3:
        raise PreconditionError("k must be at least 3")
    strict, dense = _pattern_ok(pattern)
    if not (strict and dense) or is_isomorphic(pattern, _K3):
        raise PreconditionError("pattern must be strictly 2-balanced, m2 > 1 and not K3")
    if block_budget is not None and block_budget <= 0:
        raise PreconditionError("block budget must be positive")
    trace = ColouringTrace(g)
    residue, col = _peel(g, pattern, disjoint=False, trace=trace)
    _colour_blocks(g, pattern, residue, col, "cram", k, block_budget, trace)
    return trace


def verify_trace(trace: ColouringTrace, pattern: Graph, mode: str, k: int = 3) -> dict:
    """Oracle judgments on a finished trace."""
    c = trace.colouring
    out = {"total": c.is_total, "rainbow_free": not has_rainbow_copy(c, pattern)}
    if mode == "aram":
        out["proper"] = is_proper(c)
    else:
        out["no_mono_star"] = not has_monochromatic_star(c, k)
    return out
