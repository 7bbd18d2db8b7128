"""Exact densities d, m, d2, m2 and the structural predicates built on them.

All values are :class:`fractions.Fraction`; ties such as ``m2 == 2`` are
decided exactly.  Maximisation runs over vertex subsets with all induced
edges, which is where both maxima are attained (for a fixed vertex set both
ratios grow with the edge count).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .graph import Graph

HALF = Fraction(1, 2)


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_frac(text: str) -> Fraction:
    return Fraction(text)


def d(e: int, v: int) -> Fraction:
    return Fraction(e, v)


def d2(e: int, v: int) -> Fraction:
    """2-density of a graph with ``e`` edges on ``v`` vertices."""
    if e >= 1 and v >= 3:
        return Fraction(e - 1, v - 2)
    if e == 1 and v == 2:
        return HALF
    return Fraction(0)


def _subset_edge_counts(g: Graph) -> list[int]:
    """Edge count of the induced subgraph on every vertex bitmask."""
    if g.n > 24:
        raise PreconditionError(f"subset enumeration limited to 24 vertices, got {g.n}")
    adj = g.adjmask
    counts = [0] * (1 << g.n)
    for mask in range(1, 1 << g.n):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        counts[mask] = counts[rest] + bin(adj[low] & rest).count("1")
    return counts


def _verts(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


@dataclass(frozen=True)
class DensityReport:
    d: Fraction
    m: Fraction
    m_witness: tuple[int, ...]
    d2: Fraction
    m2: Fraction
    m2_witness: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "d": frac_str(self.d),
            "m": frac_str(self.m),
            "m_witness": list(self.m_witness),
            "d2": frac_str(self.d2),
            "m2": frac_str(self.m2),
            "m2_witness": list(self.m2_witness),
        }


def density_report(g: Graph) -> DensityReport:
    if g.n == 0:
        raise PreconditionError("density is undefined for the empty graph")
    counts = _subset_edge_counts(g)
    best_m, best_m_mask = Fraction(-1), 0
    best_m2, best_m2_mask = Fraction(-1), 0
    for mask in range(1, 1 << g.n):
        size = bin(mask).count("1")
        e = counts[mask]
        dm = Fraction(e, size)
        if dm > best_m:
            best_m, best_m_mask = dm, mask
        dm2 = d2(e, size)
        if dm2 > best_m2:
            best_m2, best_m2_mask = dm2, mask
    full = (1 << g.n) - 1
    return DensityReport(
        d=Fraction(g.num_edges, g.n),
        m=best_m,
        m_witness=_verts(best_m_mask),
        d2=d2(g.num_edges, g.n),
        m2=best_m2,
        m2_witness=_verts(best_m2_mask) if best_m2_mask else _verts(full),
    )


def m2(g: Graph) -> Fraction:
    return density_report(g).m2


def m(g: Graph) -> Fraction:
    return density_report(g).m


def _proper_max(g: Graph, two: bool) -> Fraction:
    """Largest (2-)density over proper subgraphs spanned by proper vertex subsets."""
    counts = _subset_edge_counts(g)
    full = (1 << g.n) - 1
    best = Fraction(-1)
    for mask in range(1, full):
        size = bin(mask).count("1")
        val = d2(counts[mask], size) if two else Fraction(counts[mask], size)
        best = max(best, val)
    return best


def is_balanced(g: Graph) -> bool:
    rep = density_report(g)
    return rep.d == rep.m


def is_strictly_balanced(g: Graph) -> bool:
    if g.n == 0:
        raise PreconditionError("density is undefined for the empty graph")
    if g.n == 1:
        return True
    # removing edges from a graph with at least one edge strictly lowers d
    return _proper_max(g, two=False) < Fraction(g.num_edges, g.n)


def _check_two_floor(g: Graph) -> None:
    if g.n < 3 or g.num_edges < 1:
        raise PreconditionError(
            f"2-density predicates need v >= 3 and e >= 1 (got v={g.n}, e={g.num_edges})"
        )


def is_2_balanced(g: Graph) -> bool:
    _check_two_floor(g)
    rep = density_report(g)
    return rep.d2 == rep.m2


def is_strictly_2_balanced(g: Graph) -> bool:
    _check_two_floor(g)
    target = d2(g.num_edges, g.n)
    # spanning proper subgraphs have fewer edges on the same v >= 3 vertices,
    # so only proper vertex subsets can tie or beat the whole graph
    return _proper_max(g, two=True) < target


def is_spacious(g: Graph) -> bool:
    if g.num_edges < 1:
        raise PreconditionError("spaciousness needs at least one edge")
    for e in g.edges:
        if not any(not (set(e) & set(f)) for f in g.edges):
            return False
    return True


def _has_disjoint_pair(edges: list[tuple[int, int]]) -> bool:
    for a, b in itertools.combinations(edges, 2):
        if not (set(a) & set(b)):
            return True
    return False


def robust_spacious_check(g: Graph) -> bool:
    """Whether every removal of two edges leaves two vertex-disjoint edges."""
    if g.num_edges < 5:
        raise PreconditionError(f"needs at least five edges, got {g.num_edges}")
    for pair in itertools.combinations(g.edges, 2):
        rest = [e for e in g.edges if e not in pair]
        if not _has_disjoint_pair(rest):
            return False
    return True


def _connected(g: Graph, removed: int | None = None) -> bool:
    verts = [v for v in range(g.n) if v != removed]
    if not verts:
        return True
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        x = stack.pop()
        for y in g.adj[x]:
            if y != removed and y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(verts)


def is_two_connected(g: Graph) -> bool:
    """At least three vertices, connected, and no cut vertex."""
    if g.n < 3 or not _connected(g):
        return False
    return all(_connected(g, removed=v) for v in range(g.n))


@dataclass(frozen=True)
class StructuralFacts:
    min_degree: int
    two_connected: bool

    def to_json(self) -> dict:
        return {"min_degree": self.min_degree, "two_connected": self.two_connected}


def structural_facts(g: Graph) -> StructuralFacts:
    if g.n == 0:
        raise PreconditionError("structural facts need at least one vertex")
    return StructuralFacts(min_degree=g.min_degree, two_connected=is_two_connected(g))


@dataclass(frozen=True)
class GateReport:
    m2: Fraction
    bound: Fraction
    passes: bool
    regular_degree: int | None
    regular_condition: bool | None

    def to_json(self) -> dict:
        return {
            "m2": frac_str(self.m2),
            "bound": frac_str(self.bound),
            "passes": self.passes,
            "regular_degree": self.regular_degree,
            "regular_condition": self.regular_condition,
        }


def special_case_gate(g: Graph) -> GateReport:
    """Evaluate ``1 < m2(H) < delta(delta+1)/(2 delta+1)`` exactly.

    For a d-regular input also reports the sufficient condition ``v >= 4d``.
    Raises if the input is not strictly 2-balanced, has ``m2 <= 1``, or is K3
    (the one strictly 2-balanced graph with ``m2 > 1`` that is not spacious).
    """
    _check_two_floor(g)
    if not is_strictly_2_balanced(g):
        raise PreconditionError("gate requires a strictly 2-balanced graph")
    val = d2(g.num_edges, g.n)
    if val <= 1:
        raise PreconditionError(f"gate requires m2 > 1, got {frac_str(val)}")
    delta = g.min_degree
    bound = Fraction(delta * (delta + 1), 2 * delta + 1)
    if g.n == 3:
        raise PreconditionError(
            f"K3 is excluded: m2 = 2 does not satisfy m2 < {frac_str(bound)}"
        )
    reg = g.max_degree if g.max_degree == g.min_degree else None
    return GateReport(
        m2=val,
        bound=bound,
        passes=1 < val < bound,
        regular_degree=reg,
        regular_condition=(g.n >= 4 * reg) if reg is not None else None,
    )
