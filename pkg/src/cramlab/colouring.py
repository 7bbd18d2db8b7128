"""Edge colourings and the ground-truth judgments made on them."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .errors import PartialColouringError
from .graph import Edge, Graph, iter_copies, norm_edge


@dataclass
class EdgeColouring:
    """Mapping from host edges to nonnegative integer colour ids.

    ``meta`` carries provenance (for example colour pairs or a fall-back
    flag); judgments never read it.
    """

    host: Graph
    assignment: dict[Edge, int]
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        fixed = {}
        for (u, v), c in self.assignment.items():
            e = norm_edge(u, v)
            if e not in self.host.edge_set:
                raise ValueError(f"edge {e} is not in the host graph")
            if c < 0:
                raise ValueError(f"colour ids must be nonnegative, got {c}")
            fixed[e] = int(c)
        self.assignment = fixed

    def __getitem__(self, e: Edge) -> int:
        return self.assignment[norm_edge(*e)]

    def __len__(self) -> int:
        return len(self.assignment)

    @property
    def is_total(self) -> bool:
        return len(self.assignment) == self.host.num_edges

    def colours(self) -> set[int]:
        return set(self.assignment.values())

    def to_json(self) -> dict:
        return {
            "n": self.host.n,
            "colouring": [[u, v, c] for (u, v), c in sorted(self.assignment.items())],
        }


def _require_total(c: EdgeColouring) -> None:
    if not c.is_total:
        missing = c.host.num_edges - len(c.assignment)
        raise PartialColouringError(f"colouring leaves {missing} edge(s) uncoloured")


def max_star(c: EdgeColouring) -> int:
    """Largest number of same-coloured edges at one vertex."""
    counts: Counter[tuple[int, int]] = Counter()
    for (u, v), col in c.assignment.items():
        counts[u, col] += 1
        counts[v, col] += 1
    return max(counts.values(), default=0)


def has_monochromatic_star(c: EdgeColouring, k: int) -> bool:
    _require_total(c)
    return max_star(c) >= k


def is_proper(c: EdgeColouring) -> bool:
    _require_total(c)
    return max_star(c) <= 1


def rainbow_copies(c: EdgeColouring, pattern: Graph):
    for copy in iter_copies(pattern, c.host):
        if len({c.assignment[e] for e in copy}) == len(copy):
            yield copy


def has_rainbow_copy(c: EdgeColouring, pattern: Graph) -> bool:
    _require_total(c)
    return next(rainbow_copies(c, pattern), None) is not None


def colour_classes(c: EdgeColouring) -> dict[int, list[Edge]]:
    classes: dict[int, list[Edge]] = defaultdict(list)
    for e, col in sorted(c.assignment.items()):
        classes[col].append(e)
    return dict(classes)


def min_label_colouring(g: Graph) -> EdgeColouring:
    """Colour each edge by its smaller endpoint."""
    return EdgeColouring(g, {e: e[0] for e in g.edges})
