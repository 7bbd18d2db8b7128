"""Seeded G(n, p) sampling and finite-n Monte Carlo experiments."""

from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import binomtest

from .colouring import has_monochromatic_star, has_rainbow_copy, is_proper
from .density import density_report, frac_str, is_balanced
from .errors import (
    BudgetExhausted,
    DensityBoundError,
    NoValidColouring,
    PreconditionError,
)
from .graph import Graph, automorphism_count, find_copy, graph_from_name, is_isomorphic, iter_copies
from .oracle import default_jobs
from .rainbow import DEFAULT_BLOCK_BUDGET, rainbow_colour, rainbow_colour_constrained
from .triangle import colour_graph_triangle_mode, triangle_components

K3 = graph_from_name("K3")
JANSON_COPY_GUARD = 10**7
MODES = ("scan", "colour", "appear")

_MASK64 = (1 << 64) - 1


def gnp(n: int, p: float, seed: int, stream: int = 0) -> Graph:
    """Sample G(n, p) with one uniform per vertex pair in lexicographic order.

    The uniforms come from a Philox counter-based generator keyed by
    ``(seed, stream)``: the draw for pair number ``i`` depends only on the key
    and ``i``, so trials can run anywhere in any order.
    """
    if not 0 <= p <= 1:
        raise PreconditionError(f"p must lie in [0, 1], got {p}")
    if n < 0:
        raise PreconditionError("n must be nonnegative")
    total = n * (n - 1) // 2
    if total == 0 or p == 0:
        return Graph(n)
    key = (seed & _MASK64) | ((stream & _MASK64) << 64)
    rng = np.random.Generator(np.random.Philox(key=key))
    hits = np.flatnonzero(rng.random(total) < p)
    # row i (pairs (i, j), j > i) starts at i*n - i*(i+1)/2
    rows = np.arange(n, dtype=np.int64)
    offsets = rows * n - rows * (rows + 1) // 2
    i = np.searchsorted(offsets, hits, side="right") - 1
    j = hits - offsets[i] + i + 1
    return Graph(n, zip(i.tolist(), j.tolist()))


# ---------------------------------------------------------------------------
# triangle density scan


@dataclass(frozen=True)
class ScanResult:
    max_excess: float  # int, or -inf when there is no triangle component
    offender: tuple | None
    components: tuple[tuple[int, int, int], ...]  # (v, e, r) per component

    def to_json(self) -> dict:
        return {
            "max_excess": None if self.max_excess == -math.inf else int(self.max_excess),
            "offender": None if self.offender is None else [list(e) for e in self.offender],
            "components": [list(c) for c in self.components],
        }


def scan_triangle_density(g: Graph, strict: bool = True) -> ScanResult:
    """Largest ``e - 2v`` over triangle components.

    With ``strict`` an offender is any component with ``e >= 2v`` (the bound
    needed for k = 3), otherwise one with ``e > 2v`` (k = 4).
    """
    best = -math.inf
    best_comp = None
    stats = []
    for comp in triangle_components(g):
        v = len({x for e in comp for x in e})
        e = len(comp)
        stats.append((v, e, e - 2 * v + 3))
        if e - 2 * v > best:
            best, best_comp = e - 2 * v, comp
    offends = best >= 0 if strict else best > 0
    return ScanResult(best, best_comp if offends else None, tuple(stats))


# ---------------------------------------------------------------------------
# trials


@dataclass(frozen=True)
class TrialConfig:
    """One experiment.  ``p = c * n**(-exponent)``.

    ``k`` is the star size for colour mode; ``k = 2`` runs the anti-Ramsey
    pipeline (proper colourings).  Scan mode uses the strict bound when
    ``k = 3``.
    """

    n: int
    c: float
    exponent: Fraction
    trials: int
    seed: int
    pattern: Graph = K3
    pattern_name: str = "K3"
    mode: str = "scan"
    k: int = 3
    block_budget: int | None = DEFAULT_BLOCK_BUDGET

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise PreconditionError(f"mode must be one of {MODES}")
        if self.trials < 0 or self.n < 1:
            raise PreconditionError("need n >= 1 and trials >= 0")
        if not 0 < self.p < 1:
            raise PreconditionError(f"p = {self.p} is not in (0, 1)")

    @property
    def p(self) -> float:
        return float(self.c) * self.n ** (-float(self.exponent))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "c": float(self.c),
            "exponent": frac_str(Fraction(self.exponent)),
            "p": self.p,
            "trials": self.trials,
            "seed": self.seed,
            "pattern": self.pattern_name,
            "mode": self.mode,
            "k": self.k,
            "block_budget": self.block_budget,
        }


@dataclass
class TrialReport:
    config: TrialConfig
    rows: list[dict] = field(default_factory=list)
    timings: list[float] = field(default_factory=list)

    def counts(self) -> Counter:
        return Counter(r["status"] for r in self.rows)

    @property
    def decided(self) -> int:
        return len(self.rows) - self.counts()["indeterminate"]

    @property
    def success_fraction(self) -> float | None:
        return self.counts()["success"] / self.decided if self.decided else None

    def wilson(self) -> tuple[float, float] | None:
        return wilson_interval(self.counts()["success"], self.decided)

    def to_json(self, include_timing: bool = True) -> dict:
        counts = self.counts()
        out = {
            "config": self.config.to_json(),
            "rows": self.rows,
            "aggregate": {
                "counts": {s: counts[s] for s in sorted(counts)},
                "decided": self.decided,
                "success_fraction": self.success_fraction,
                "wilson95": list(self.wilson()) if self.wilson() else None,
                "max_component": _max_component(self.rows),
            },
        }
        if include_timing:
            out["timings"] = self.timings
        return out


def _max_component(rows: list[dict]) -> list[int] | None:
    comps = [tuple(r["max_component"]) for r in rows if r.get("max_component")]
    if not comps:
        return None
    return list(max(comps, key=lambda c: (c[1] - 2 * c[0], c)))


def wilson_interval(successes: int, total: int) -> tuple[float, float] | None:
    if total == 0:
        return None
    ci = binomtest(successes, total).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def _colour_trial(g: Graph, cfg: TrialConfig) -> dict:
    if is_isomorphic(cfg.pattern, K3):
        try:
            col = colour_graph_triangle_mode(g, cfg.k)
        except DensityBoundError as exc:
            return {"status": "certificate", "certificate": [list(e) for e in exc.edges]}
        sound = not has_monochromatic_star(col, cfg.k) and not has_rainbow_copy(col, K3)
        return {"status": "success" if sound else "unsound", "fallbacks": col.meta["fallbacks"]}
    try:
        if cfg.k == 2:
            trace = rainbow_colour(g, cfg.pattern, cfg.block_budget)
        else:
            trace = rainbow_colour_constrained(g, cfg.pattern, cfg.k, cfg.block_budget)
    except BudgetExhausted:
        return {"status": "indeterminate"}
    except NoValidColouring as exc:
        return {"status": "certificate", "certificate": [list(e) for e in exc.edges]}
    col = trace.colouring
    if cfg.k == 2:
        sound = is_proper(col)
    else:
        sound = not has_monochromatic_star(col, cfg.k)
    sound = sound and col.is_total and not has_rainbow_copy(col, cfg.pattern)
    return {
        "status": "success" if sound else "unsound",
        "pairs": len(trace.paired_edges),
        "blocks": len(trace.block_colourings),
    }


def run_trial(cfg: TrialConfig, trial: int) -> tuple[dict, float]:
    start = time.perf_counter()
    g = gnp(cfg.n, cfg.p, cfg.seed, stream=trial)
    row: dict = {"trial": trial, "edges": g.num_edges}
    if cfg.mode == "appear":
        row["status"] = "success" if find_copy(cfg.pattern, g) is not None else "failure"
    else:
        scan = scan_triangle_density(g, strict=cfg.k == 3)
        row["max_component"] = (
            list(max(scan.components, key=lambda c: (c[1] - 2 * c[0], c)))
            if scan.components
            else None
        )
        if cfg.mode == "scan":
            row["status"] = "success" if scan.offender is None else "certificate"
            if scan.offender is not None:
                row["certificate"] = [list(e) for e in scan.offender]
        else:
            row.update(_colour_trial(g, cfg))
    return row, time.perf_counter() - start


def _run_chunk(args) -> list[tuple[dict, float]]:
    cfg, trials = args
    return [run_trial(cfg, t) for t in trials]


def run_experiment(cfg: TrialConfig, jobs: int | None = None) -> TrialReport:
    """Run every trial; rows come back in trial order whatever ``jobs`` is."""
    jobs = default_jobs() if jobs is None else jobs
    report = TrialReport(cfg)
    if cfg.trials == 0:
        return report
    if jobs <= 1:
        results = [run_trial(cfg, t) for t in range(cfg.trials)]
    else:
        chunks = [(cfg, list(range(s, cfg.trials, jobs))) for s in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, chunks))
        results = [None] * cfg.trials
        for (_, trials), part in zip(chunks, parts):
            for t, res in zip(trials, part):
                results[t] = res
    for row, secs in results:
        report.rows.append(row)
        report.timings.append(secs)
    return report


# ---------------------------------------------------------------------------
# subgraph appearance


@dataclass(frozen=True)
class AppearanceEstimate:
    p: float
    hits: int
    trials: int
    p_hat: float
    ci: tuple[float, float]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "hits": self.hits,
            "trials": self.trials,
            "p_hat": self.p_hat,
            "ci": list(self.ci),
        }


def appearance_frequency(f: Graph, n: int, p: float, trials: int, seed: int) -> AppearanceEstimate:
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    hits = sum(find_copy(f, gnp(n, p, seed, stream=t)) is not None for t in range(trials))
    return AppearanceEstimate(p, hits, trials, hits / trials, wilson_interval(hits, trials))


def estimate_appearance(f: Graph, n: int, c: float, trials: int, seed: int) -> AppearanceEstimate:
    """Containment frequency of ``f`` in G(n, c * n**(-1/m(f)))."""
    if not is_balanced(f):
        raise PreconditionError("f must be balanced (m(f) = d(f))")
    exponent = 1 / density_report(f).m
    p = float(c) * n ** (-float(exponent))
    if not 0 <= p <= 1:
        raise PreconditionError(f"p = {p} is outside [0, 1]")
    return appearance_frequency(f, n, p, trials, seed)


# ---------------------------------------------------------------------------
# Janson


@dataclass(frozen=True)
class JansonBound:
    copies: int
    mu_terms: dict[int, int]  # edge count -> number of copies
    delta_terms: dict[int, int]  # union size -> number of ordered overlapping pairs
    mu: Fraction | float
    delta: Fraction | float
    lower_bound: float

    def to_json(self) -> dict:
        def num(x):
            return frac_str(x) if isinstance(x, Fraction) else x

        return {
            "copies": self.copies,
            "mu_terms": {str(k): v for k, v in sorted(self.mu_terms.items())},
            "delta_terms": {str(k): v for k, v in sorted(self.delta_terms.items())},
            "mu": num(self.mu),
            "delta": num(self.delta),
            "mu_float": float(self.mu),
            "delta_float": float(self.delta),
            "lower_bound": self.lower_bound,
        }


def copy_count_in_complete(f: Graph, n: int) -> int:
    """Number of copies of ``f`` (isolated vertices ignored) in K_n."""
    core, _ = f.compact()
    v = core.n
    if v > n:
        return 0
    return math.perm(n, v) // automorphism_count(core)


def janson_bound(f: Graph, n: int, p: Fraction | float) -> JansonBound:
    """Exact mu and Delta for copies of ``f`` in G(n, p).

    Both are polynomials in ``p`` with integer coefficients counted by
    enumeration; pass a :class:`Fraction` to keep them exact.  Only the final
    ``1 - exp(-mu + Delta/2)`` is floating point.
    """
    if not 0 <= p <= 1:
        raise PreconditionError("p must lie in [0, 1]")
    count = copy_count_in_complete(f, n)
    if count > JANSON_COPY_GUARD:
        raise PreconditionError(
            f"{count} copies exceed the enumeration guard of {JANSON_COPY_GUARD}"
        )
    host = graph_from_name(f"K{n}") if n >= 1 else Graph(0)
    copies = list(iter_copies(f, host))
    per_edge: dict = {}
    for i, cp in enumerate(copies):
        for e in cp:
            per_edge.setdefault(e, []).append(i)
    mu_terms = Counter(len(cp) for cp in copies)
    delta_terms: Counter = Counter()
    for i, a in enumerate(copies):
        partners = {j for e in a for j in per_edge[e] if j != i}
        for j in partners:
            delta_terms[len(a | copies[j])] += 1
    mu = sum(cnt * p**size for size, cnt in mu_terms.items())
    delta = sum(cnt * p**size for size, cnt in delta_terms.items())
    if isinstance(p, Fraction):
        mu, delta = Fraction(mu), Fraction(delta)
    lower = 1 - math.exp(-float(mu) + float(delta) / 2)
    return JansonBound(len(copies), dict(mu_terms), dict(delta_terms), mu, delta, lower)
