import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import binom, chisquare

from cramlab.density import m2
from cramlab.errors import PreconditionError
from cramlab.experiments import (
    TrialConfig,
    appearance_frequency,
    copy_count_in_complete,
    estimate_appearance,
    gnp,
    janson_bound,
    run_experiment,
    scan_triangle_density,
    wilson_interval,
)
from cramlab.graph import Graph, disjoint_union, graph_from_name

K3 = graph_from_name("K3")


def test_gnp_extremes():
    assert gnp(30, 0.0, 1).num_edges == 0
    assert gnp(12, 1.0, 1) == graph_from_name("K12")
    assert gnp(1, 0.5, 1).num_edges == 0


def test_gnp_rejects_bad_p():
    with pytest.raises(PreconditionError):
        gnp(5, 1.5, 0)


def test_gnp_is_keyed_by_seed_and_stream():
    a = gnp(200, 0.05, 42, stream=3)
    assert a == gnp(200, 0.05, 42, stream=3)
    assert a != gnp(200, 0.05, 42, stream=4)
    assert a != gnp(200, 0.05, 43, stream=3)


def test_gnp_pairs_follow_the_uniform_stream():
    # pair number i is kept iff uniform number i is below p
    n, p, seed = 9, 0.4, 7
    key = seed | (0 << 64)
    u = np.random.Generator(np.random.Philox(key=key)).random(n * (n - 1) // 2)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    expected = [pr for pr, x in zip(pairs, u) if x < p]
    assert list(gnp(n, p, seed).edges) == expected


def test_gnp_edge_count_within_four_sigma():
    n, p = 1000, 0.01
    total = n * (n - 1) // 2
    mean, sd = total * p, math.sqrt(total * p * (1 - p))
    for seed in range(100):
        assert abs(gnp(n, p, seed).num_edges - mean) <= 4 * sd


def test_gnp_edge_count_distribution():
    n, p, samples = 10, 0.3, 10_000
    total = n * (n - 1) // 2
    counts = np.bincount([gnp(n, p, 2024, stream=s).num_edges for s in range(samples)], minlength=total + 1)
    expected = binom.pmf(np.arange(total + 1), total, p) * samples
    # merge sparse tails so every bin expects at least 5
    lo = int(np.argmax(expected >= 5))
    hi = total - int(np.argmax(expected[::-1] >= 5))
    obs = np.concatenate([[counts[:lo].sum()], counts[lo:hi], [counts[hi:].sum()]])
    exp = np.concatenate([[expected[:lo].sum()], expected[lo:hi], [expected[hi:].sum()]])
    exp *= obs.sum() / exp.sum()
    assert chisquare(obs, exp).pvalue > 1e-3


def test_scan_examples():
    k5 = graph_from_name("K5")
    res = scan_triangle_density(disjoint_union(k5, graph_from_name("C5")))
    assert res.max_excess == 0 and sorted(res.offender) == list(k5.edges)
    assert scan_triangle_density(graph_from_name("C5")).max_excess == -math.inf
    assert scan_triangle_density(graph_from_name("C5")).to_json()["max_excess"] is None
    res = scan_triangle_density(graph_from_name("K4"))
    assert res.max_excess == -2 and res.offender is None
    assert scan_triangle_density(k5, strict=False).offender is None


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    z = 1.959963984540054
    half = z * math.sqrt(0.25 / 100 + z * z / 4e4) / (1 + z * z / 100)
    assert lo == pytest.approx(0.5 - half) and hi == pytest.approx(0.5 + half)
    assert wilson_interval(0, 0) is None


def test_empty_experiment():
    rep = run_experiment(TrialConfig(100, 0.05, Fraction(1, 2), 0, 1))
    assert rep.rows == [] and rep.success_fraction is None


def test_config_validation():
    with pytest.raises(PreconditionError):
        TrialConfig(10, 5.0, Fraction(0), 1, 1)
    with pytest.raises(PreconditionError):
        TrialConfig(10, 0.1, Fraction(1, 2), 1, 1, mode="nope")


@pytest.mark.parametrize("mode", ["scan", "colour", "appear"])
def test_report_independent_of_workers(mode):
    cfg = TrialConfig(120, 0.5, Fraction(1, 2), 6, 99, mode=mode)
    one = run_experiment(cfg, jobs=1).to_json(include_timing=False)
    two = run_experiment(cfg, jobs=2).to_json(include_timing=False)
    assert one == two and len(one["rows"]) == 6


def test_colour_mode_rows():
    cfg = TrialConfig(300, 0.05, Fraction(1, 2), 10, 3, mode="colour")
    rep = run_experiment(cfg, jobs=1)
    assert rep.counts()["unsound"] == 0
    for pattern, k in (("C5", 2), ("C4", 3)):
        cfg = TrialConfig(
            200, 0.5, Fraction(3, 4), 5, 3, pattern=graph_from_name(pattern),
            pattern_name=pattern, mode="colour", k=k,
        )
        rep = run_experiment(cfg, jobs=1)
        assert rep.counts()["unsound"] == 0


@pytest.mark.parametrize("name,n", [("C5", 40), ("C6", 40), ("K4", 30)])
@pytest.mark.parametrize("k", [2, 3])
def test_colour_mode_sound_where_copies_exist(name, n, k):
    # at c = 1 on small n most samples contain copies, unlike the sparse acceptance run
    pattern = graph_from_name(name)
    cfg = TrialConfig(
        n, 1.0, 1 / m2(pattern), 10, 1, pattern=pattern, pattern_name=name,
        mode="colour", k=k, block_budget=200_000,
    )
    rep = run_experiment(cfg, jobs=1)
    decided = [r for r in rep.rows if r["status"] != "indeterminate"]
    assert all(r["status"] == "success" for r in decided)
    assert sum(1 for r in decided if r["pairs"] or r["blocks"]) >= 5


def test_indeterminate_trials_leave_the_fraction():
    cfg = TrialConfig(
        20, 0.9, Fraction(0), 3, 5, pattern=graph_from_name("C5"),
        pattern_name="C5", mode="colour", k=2, block_budget=1,
    )
    rep = run_experiment(cfg, jobs=1)
    counts = rep.counts()
    assert counts["indeterminate"] + counts["certificate"] + counts["success"] == 3
    assert rep.decided == 3 - counts["indeterminate"]


def test_appearance_examples():
    with pytest.raises(PreconditionError):
        estimate_appearance(Graph(5, list(graph_from_name("K4").edges) + [(3, 4)]), 20, 1, 5, 0)
    a = estimate_appearance(K3, 60, 1.0, 1, 8)
    assert a == estimate_appearance(K3, 60, 1.0, 1, 8)
    n, c, trials = 40, 2.0, 2000
    est = estimate_appearance(graph_from_name("K2"), n, c, trials, 11)
    exact = 1 - (1 - c / n**2) ** (n * (n - 1) // 2)
    assert est.p == pytest.approx(c / n**2)
    assert est.ci[0] <= exact <= est.ci[1]


def test_janson_examples():
    p = Fraction(1, 3)
    jb = janson_bound(K3, 3, p)
    assert (jb.mu, jb.delta) == (p**3, 0)
    assert jb.lower_bound == pytest.approx(1 - math.exp(-float(p) ** 3))
    jb = janson_bound(K3, 4, p)
    assert (jb.mu, jb.delta) == (4 * p**3, 12 * p**5)
    assert jb.lower_bound == pytest.approx(1 - math.exp(-4 / 27 + 6 / 243))
    assert janson_bound(graph_from_name("C4"), 6, Fraction(0)).lower_bound == 0


def test_janson_guard():
    assert copy_count_in_complete(K3, 4) == 4
    assert copy_count_in_complete(graph_from_name("C5"), 5) == 12
    with pytest.raises(PreconditionError):
        janson_bound(K3, 1000, 0.001)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
def test_janson_is_a_lower_bound(p):
    jb = janson_bound(K3, 5, p)
    est = appearance_frequency(K3, 5, p, 3000, 17)
    se = math.sqrt(max(est.p_hat * (1 - est.p_hat), 1e-12) / est.trials)
    assert est.p_hat >= jb.lower_bound - 3 * se
