"""Exhaustive arrows-deciders over canonical edge colourings.

Colourings are enumerated as restricted-growth strings over the edges in
lexicographic order: edge ``i`` gets a colour in ``0..max_so_far+1``.  Every
set partition of the edge set is visited exactly once, so colour renaming
symmetry is gone.  A branch is cut only when the partial colouring already
contains a monochromatic star with ``k`` arms, or a fully coloured copy of
the pattern is rainbow; neither event can be undone by extending it.

The anti-Ramsey decider is the same search with ``k = 2`` (a colouring with
no monochromatic cherry is exactly a proper one).
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .colouring import (  # noqa: F401  (re-exported judgments)
    EdgeColouring,
    has_monochromatic_star,
    has_rainbow_copy,
    is_proper,
    min_label_colouring,
)
from .errors import BudgetExhausted, PreconditionError
from .graph import Graph, enumerate_copies

log = logging.getLogger(__name__)

MAX_EXACT_EDGES = 14


@dataclass
class SearchResult:
    status: str  # "found" | "none" | "exhausted"
    colours: list[int] | None
    explored: int


class _Exhausted(Exception):
    pass


class ColouringSearch:
    """Backtracking over canonical colourings of ``host`` avoiding a
    monochromatic K_{1,k} and a rainbow ``pattern``."""

    def __init__(
        self, host: Graph, pattern: Graph | None, k: int, max_colours: int | None = None
    ):
        if k < 2:
            raise PreconditionError(f"star arm count must be >= 2, got {k}")
        self.host = host
        self.k = k
        self.m = host.num_edges
        self.max_colours = self.m if max_colours is None else max_colours
        self.ends = list(host.edges)
        idx = host.edge_index
        # copies checked when their last edge (in edge order) is coloured
        closing: list[list[tuple[int, ...]]] = [[] for _ in range(self.m)]
        if pattern is not None and pattern.num_edges >= 2:
            for copy in enumerate_copies(pattern, host):
                ids = sorted(idx[e] for e in copy)
                closing[ids[-1]].append(tuple(ids[:-1]))
        self.closing = closing

    def prefixes(self, depth: int) -> list[list[int]]:
        """All admissible colour prefixes of the first ``depth`` edges."""
        out: list[list[int]] = []
        depth = min(depth, self.m)
        self._walk(lambda cols: out.append(list(cols)), limit=None, stop_depth=depth)
        return out

    def run(self, prefix: list[int] | None = None, budget: int | None = None) -> SearchResult:
        found: list[list[int]] = []

        def on_leaf(cols: list[int]) -> bool:
            found.append(list(cols))
            return True

        try:
            explored = self._walk(on_leaf, limit=budget, stop_depth=self.m, prefix=prefix or [])
        except _Exhausted as exc:
            return SearchResult("exhausted", None, exc.args[0])
        if found:
            return SearchResult("found", found[0], explored)
        return SearchResult("none", None, explored)

    def _walk(self, on_leaf, limit, stop_depth, prefix=()) -> int:
        m, k = self.m, self.k
        cap = self.max_colours
        ends = self.ends
        closing = self.closing
        n = self.host.n
        cols = [-1] * m
        # count[v][c] for colours 0..m-1
        count = [[0] * (m + 1) for _ in range(n)]
        explored = 0

        def admissible(i: int, c: int) -> bool:
            a, b = ends[i]
            if count[a][c] + 1 >= k or count[b][c] + 1 >= k:
                return False
            for others in closing[i]:
                seen = {c}
                for j in others:
                    cj = cols[j]
                    if cj in seen:
                        break
                    seen.add(cj)
                else:
                    return False
            return True

        def assign(i: int, c: int) -> None:
            a, b = ends[i]
            cols[i] = c
            count[a][c] += 1
            count[b][c] += 1

        def unassign(i: int) -> None:
            a, b = ends[i]
            c = cols[i]
            count[a][c] -= 1
            count[b][c] -= 1
            cols[i] = -1

        top = -1
        for i, c in enumerate(prefix):
            if c > top + 1 or c >= cap or not admissible(i, c):
                return 0
            assign(i, c)
            top = max(top, c)

        def rec(i: int, top: int) -> bool:
            nonlocal explored
            if i == stop_depth:
                return bool(on_leaf(cols[:i]))
            for c in range(min(top + 2, cap)):
                if admissible(i, c):
                    explored += 1
                    if limit is not None and explored > limit:
                        raise _Exhausted(explored)
                    assign(i, c)
                    if rec(i + 1, top if c <= top else c):
                        return True
                    unassign(i)
            return False

        rec(len(prefix), top)
        return explored

    def to_colouring(self, colours: list[int]) -> EdgeColouring:
        return EdgeColouring(self.host, dict(zip(self.ends, colours)))


def search_colouring(
    host: Graph, pattern: Graph | None, k: int, budget: int | None = None
) -> tuple[EdgeColouring | None, int]:
    """Find a colouring with no monochromatic K_{1,k} and no rainbow pattern.

    Returns ``(colouring, explored)``; the colouring is ``None`` when the
    canonical space is exhausted.  Raises :class:`BudgetExhausted` when
    ``budget`` search nodes are not enough.
    """
    engine = ColouringSearch(host, pattern, k)
    res = engine.run(budget=budget)
    if res.status == "exhausted":
        raise BudgetExhausted(f"search budget of {budget} nodes exhausted", res.explored)
    if res.status == "found":
        return engine.to_colouring(res.colours), res.explored
    return None, res.explored


@dataclass
class Verdict:
    arrows: bool
    witness: EdgeColouring | None
    explored: int

    def to_json(self) -> dict:
        return {
            "arrows": self.arrows,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "explored": self.explored,
        }


def _subtree(args) -> tuple[int, SearchResult]:
    index, n, edges, p_n, p_edges, k, prefix, budget = args
    engine = ColouringSearch(Graph(n, edges), Graph(p_n, p_edges) if p_edges else None, k)
    return index, engine.run(prefix=prefix, budget=budget)


def default_jobs() -> int:
    return int(os.environ.get("CRAMLAB_JOBS", "1"))


def _decide(g: Graph, k: int, pattern: Graph, budget: int | None, jobs: int | None) -> Verdict:
    if budget is None and g.num_edges > MAX_EXACT_EDGES:
        raise PreconditionError(
            f"exact decision limited to {MAX_EXACT_EDGES} edges without an explicit budget"
        )
    jobs = default_jobs() if jobs is None else jobs
    engine = ColouringSearch(g, pattern, k)
    if jobs <= 1 or g.num_edges < 4:
        res = engine.run(budget=budget)
        if res.status == "exhausted":
            raise BudgetExhausted(f"search budget of {budget} nodes exhausted", res.explored)
        if res.status == "found":
            return Verdict(False, engine.to_colouring(res.colours), res.explored)
        return Verdict(True, None, res.explored)

    prefixes = engine.prefixes(3)
    tasks = [
        (i, g.n, g.edges, pattern.n, pattern.edges, k, pre, budget)
        for i, pre in enumerate(prefixes)
    ]
    results: dict[int, SearchResult] = {}
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_subtree, t) for t in tasks]
        best_found: int | None = None
        for fut in futures:
            idx, res = fut.result()
            results[idx] = res
            if res.status == "found":
                best_found = idx
                # earlier subtrees already finished; later ones are irrelevant
                for later in futures[idx + 1:]:
                    later.cancel()
                break
            if res.status == "exhausted":
                for later in futures[idx + 1:]:
                    later.cancel()
                raise BudgetExhausted(
                    f"search budget of {budget} nodes exhausted in subtree {idx}", res.explored
                )
    explored = len(prefixes) + sum(r.explored for r in results.values())
    if best_found is not None:
        return Verdict(False, engine.to_colouring(results[best_found].colours), explored)
    return Verdict(True, None, explored)


def decide_cram(
    g: Graph, k: int, pattern: Graph, budget: int | None = None, jobs: int | None = None
) -> Verdict:
    """Decide whether every colouring of ``g`` has a monochromatic K_{1,k}
    or a rainbow ``pattern``."""
    if k < 2:
        raise PreconditionError("k must be at least 2")
    return _decide(g, k, pattern, budget, jobs)


def decide_aram(
    g: Graph, pattern: Graph, budget: int | None = None, jobs: int | None = None
) -> Verdict:
    """Decide whether every proper colouring of ``g`` has a rainbow ``pattern``."""
    return _decide(g, 2, pattern, budget, jobs)
