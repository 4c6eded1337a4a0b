"""Acceptance suite: one test per release criterion, tolerances pinned.

Each test prints a PASS line on success (visible with `pytest -s`); a
failure carries the measured values in its assertion message.
"""

import itertools
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from tgin.analytics import (
    attribute_share_stats,
    clique_probability,
    homophily_stats,
)
from tgin.catalog import load_catalog, save_catalog
from tgin.config import PipelineConfig
from tgin.dpp import (
    GAIN_FLOOR,
    greedy_map,
    kernel_from_arrays,
    select_triangles,
    subset_probability,
    weight_sample,
)
from tgin.graph import (
    build_graph,
    edge_key,
    load_behavior_log,
    load_graph,
    save_behavior_log,
    save_graph,
    _filter_key,
)
from tgin.index_io import read_index, write_index
from tgin.pipeline import build_index
from tgin.synth import (
    make_behavior_log,
    make_clustered_catalog,
    make_clustered_triangles,
    make_er_graph,
    make_planted_graph,
)
from tgin.triangles import extract_triangles

from test_index_io import random_index


def announce(line):
    print(f"\nPASS: {line}")


# --------------------------------------------------------------------------
# Criterion 1: triangle extraction exactly equals an O(n^3) brute-force
# enumerator on 20 random G(200, 0.05) graphs for k in {0,1,2}; < 60 s.
# --------------------------------------------------------------------------

def oracle_triangles_by_order(g, center, radius):
    """Independent enumerator: BFS over raw adjacency, then every triple."""
    dist = {center: 0}
    frontier = [center]
    for d in range(1, radius + 1):
        nxt = []
        for u in frontier:
            for v in g.adjacency[u]:
                if v not in dist:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    members = sorted(dist)
    m = len(members)
    adj = np.zeros((m, m), dtype=bool)
    for i, a in enumerate(members):
        for j in range(i + 1, m):
            if edge_key(a, members[j]) in g.edges:
                adj[i, j] = adj[j, i] = True
    idx = np.arange(m)
    increasing = (idx[:, None, None] < idx[None, :, None]) \
        & (idx[None, :, None] < idx[None, None, :])
    cube = adj[:, :, None] & adj[:, None, :] & adj[None, :, :] & increasing
    buckets = {k: set() for k in range(radius + 1)}
    darr = np.array([dist[v] for v in members])
    for i, j, k in np.argwhere(cube):
        tri = (members[i], members[j], members[k])
        buckets[int(min(darr[i], darr[j], darr[k]))].add(tri)
    return buckets


def test_triangle_oracle_twenty_random_graphs():
    start = time.time()
    rng = np.random.default_rng(2025)
    centers_checked = 0
    for seed in range(20):
        g = make_er_graph(200, 0.05, seed=seed)
        nodes = g.sorted_nodes
        for ci in rng.choice(len(nodes), size=10, replace=False):
            center = nodes[int(ci)]
            expected = oracle_triangles_by_order(g, center, 2)
            for k in (0, 1, 2):
                got = {t.nodes for t in
                       extract_triangles(g, center, k, radius=2,
                                         neighbor_cap=None).triangles}
                assert got == expected[k], \
                    f"seed {seed} center {center} k={k}: mismatch"
            centers_checked += 1
    elapsed = time.time() - start
    assert elapsed < 60.0, f"triangle oracle suite took {elapsed:.1f}s"
    announce(f"triangle oracle: 20 graphs, {centers_checked} centers, "
             f"k in {{0,1,2}} exact, {elapsed:.1f}s < 60s")


# --------------------------------------------------------------------------
# Criterion 2: zero false negatives on edge replay; measured Bloom
# false-positive rate on 100k absent pairs <= 2% at default sizing.
# --------------------------------------------------------------------------

def test_edge_membership_and_bloom_rate():
    g = make_er_graph(1000, 0.01, seed=3)
    assert len(g.edges) > 3000
    for a, b in g.edges:
        assert g.has_edge(a, b) and g.has_edge(b, a)

    bf = g.membership_filter
    rng = np.random.default_rng(11)
    nodes = g.sorted_nodes
    tested = false_pos = 0
    while tested < 100_000:
        i, j = rng.integers(0, len(nodes), size=2)
        if i == j:
            continue
        pair = edge_key(nodes[int(i)], nodes[int(j)])
        if pair in g.edges:
            continue
        tested += 1
        false_pos += bf.might_contain(_filter_key(pair))
    rate = false_pos / tested
    assert rate <= 0.02, f"bloom false-positive rate {rate:.4f} > 2%"
    announce(f"edge membership: {len(g.edges)} edges replayed with zero false "
             f"negatives; bloom FP rate {rate:.4%} <= 2%")


# --------------------------------------------------------------------------
# Criterion 3: greedy selection matches dense determinant ratios on 100
# random kernels (N <= 12); gains within 1e-9 relative; kernels PSD.
# --------------------------------------------------------------------------

def test_dpp_greedy_oracle_hundred_kernels():
    rng = np.random.default_rng(77)
    for trial in range(100):
        size = int(rng.integers(2, 13))
        feats = rng.normal(size=(size, int(rng.integers(2, 9))))
        rel = rng.uniform(0, 5, size=size)
        kernel = kernel_from_arrays(rel, feats, theta=float(rng.uniform(0.2, 0.8)))

        min_eig = float(np.linalg.eigvalsh(kernel.L).min())
        assert min_eig >= -1e-8 * np.trace(kernel.L) / size, \
            f"kernel {trial} not PSD: min eig {min_eig}"

        n = int(rng.integers(1, 5))
        result = greedy_map(kernel, n)
        chosen = []
        for step, picked in enumerate(result.indices):
            base = np.linalg.slogdet(
                kernel.L[np.ix_(chosen, chosen)])[1] if chosen else 0.0
            best_gain, best_idx = -np.inf, None
            for cand in range(size):
                if cand in chosen:
                    continue
                sub = chosen + [cand]
                sign, logdet = np.linalg.slogdet(kernel.L[np.ix_(sub, sub)])
                gain = logdet - base if sign > 0 else -np.inf
                if gain > best_gain + 1e-12:
                    best_gain, best_idx = gain, cand
            assert picked == best_idx, \
                f"kernel {trial} step {step}: {picked} != oracle {best_idx}"
            assert abs(result.gains[step] - best_gain) \
                <= 1e-9 * max(1.0, abs(best_gain)), \
                f"kernel {trial} step {step}: gain mismatch"
            chosen.append(picked)
    announce("dpp greedy oracle: 100 kernels, every step matches dense "
             "determinant ratios within 1e-9; PSD check passed")


# --------------------------------------------------------------------------
# Criterion 4: L = I with N <= 10 gives every subset probability 1/2^N
# within 1e-12, checked by exhaustive enumeration.
# --------------------------------------------------------------------------

def test_identity_kernel_subset_probabilities():
    for size in (1, 3, 6, 10):
        kernel = kernel_from_arrays(np.zeros(size), np.eye(size), 0.5)
        np.testing.assert_array_equal(kernel.L, np.eye(size))
        expected = 0.5 ** size
        worst = 0.0
        for r in range(size + 1):
            for subset in itertools.combinations(range(size), r):
                p = subset_probability(kernel, list(subset))
                worst = max(worst, abs(p - expected))
        assert worst < 1e-12, f"N={size}: worst deviation {worst}"
    announce("identity kernel: exhaustive subset probabilities equal 1/2^N "
             "within 1e-12 for N up to 10")


# --------------------------------------------------------------------------
# Criterion 5: G(300, 0.2) 3-clique Monte Carlo with 200k trials lands
# within 3 binomial standard errors of p^3 = 0.008.
# --------------------------------------------------------------------------

def test_clique_monte_carlo_er_closed_form():
    g = make_er_graph(300, 0.2, seed=1)
    trials = 200_000
    prob, _ = clique_probability(g, 3, trials=trials, seed=7)
    expected = 0.2 ** 3
    se = math.sqrt(expected * (1 - expected) / trials)
    assert abs(prob - expected) <= 3 * se, \
        f"estimate {prob:.6f} vs {expected:.6f}, 3SE={3 * se:.6f}"
    announce(f"clique Monte Carlo: estimate {prob:.6f} within 3 binomial SE "
             f"({3 * se:.6f}) of p^3 = {expected}")


# --------------------------------------------------------------------------
# Criterion 6: on clustered synthetic catalogs with equal triangle budgets,
# diverse selection reaches strictly more distinct keywords than
# weight-based sampling in >= 90% of 50 seeded runs.
# --------------------------------------------------------------------------

def test_diversity_ordering_dpp_vs_weight():
    from tgin.analytics import diversity_metric
    wins = 0
    for seed in range(50):
        catalog, clusters = make_clustered_catalog(48, 8, 12, seed=seed)
        pool = make_clustered_triangles(catalog, clusters, per_cluster=6,
                                        seed=seed + 100, hot_cluster=0,
                                        hot_boost=8.0)
        dpp_pick = [s.triangle for s in select_triangles(pool, 0.5, 10)]
        weight_pick = weight_sample(pool, 10, seed=seed + 500)
        dpp_count = diversity_metric([v for t in dpp_pick for v in t.nodes],
                                     catalog, "keyword")
        weight_count = diversity_metric([v for t in weight_pick for v in t.nodes],
                                        catalog, "keyword")
        wins += dpp_count > weight_count
    assert wins >= 45, f"dpp strictly more diverse in only {wins}/50 runs"
    announce(f"diversity ordering: dpp beat weight sampling in {wins}/50 runs "
             f"(needed >= 45)")


# --------------------------------------------------------------------------
# Criterion 7: planted-cluster homophily: triangle share rate exceeds the
# random-triple share rate by at least 20 percentage points.
# --------------------------------------------------------------------------

def test_planted_homophily_gap():
    catalog, clusters = make_clustered_catalog(120, 12, 8, seed=21)
    g = make_planted_graph(clusters, intra_p=0.75, inter_p=0.02, seed=21)

    report = homophily_stats(g, catalog, item_sample_size=120,
                             triangles_per_item=40, seed=5)
    assert report.sample_size > 0

    rng = np.random.default_rng(6)
    nodes = g.sorted_nodes
    triples = [[nodes[i] for i in rng.choice(len(nodes), 3, replace=False)]
               for _ in range(4000)]
    random_share, _ = attribute_share_stats(catalog, triples)

    gap = report.share_rate - random_share
    assert gap >= 0.20, (f"triangle share {report.share_rate:.3f} vs random "
                         f"{random_share:.3f}: gap {gap:.3f} < 0.20")
    announce(f"planted homophily: triangle share {report.share_rate:.3f} vs "
             f"random triple share {random_share:.3f} (gap {gap:.2f} >= 0.20)")


# --------------------------------------------------------------------------
# Criterion 8: CLI determinism (byte-identical reruns of every command) and
# index round-trips: read(write(x)) = x.
# --------------------------------------------------------------------------

def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "tgin", *args],
                          capture_output=True, text=True)


def test_cli_determinism_and_round_trip(tmp_path):
    catalog, clusters = make_clustered_catalog(60, 6, 8, seed=31)
    log = make_behavior_log(clusters, n_users=80, events_per_user=25, seed=32)
    save_behavior_log(log, tmp_path / "log.tsv")
    save_catalog(catalog, tmp_path / "catalog.tsv")

    commands = {
        "build-graph": ["build-graph", "--log", str(tmp_path / "log.tsv"),
                        "--out", None],
        "build-index": None,  # depends on the graph; filled below
        "stats-homophily": None,
        "stats-clique": None,
        "stats-diversity": None,
    }
    outputs = {}
    for run in (1, 2):
        out = tmp_path / f"graph{run}.tsv"
        assert run_cli("build-graph", "--log", str(tmp_path / "log.tsv"),
                       "--out", str(out)).returncode == 0
        outputs.setdefault("build-graph", []).append(out.read_bytes())
    graph_path = tmp_path / "graph1.tsv"

    per_command = {
        "build-index": ["build-index", "--graph", str(graph_path),
                        "--catalog", str(tmp_path / "catalog.tsv"), "--n", "4"],
        "stats-homophily": ["stats", "homophily", "--graph", str(graph_path),
                            "--catalog", str(tmp_path / "catalog.tsv"),
                            "--items", "30", "--seed", "3"],
        "stats-clique": ["stats", "clique", "--graph", str(graph_path),
                         "--trials", "5000", "--seed", "3"],
        "stats-diversity": ["stats", "diversity", "--graph", str(graph_path),
                            "--catalog", str(tmp_path / "catalog.tsv"),
                            "--items", "15", "--seed", "3"],
    }
    for name, argv in per_command.items():
        for run in (1, 2):
            out = tmp_path / f"{name}{run}.out"
            result = run_cli(*argv, "--out", str(out))
            assert result.returncode == 0, f"{name}: {result.stderr}"
            outputs.setdefault(name, []).append(out.read_bytes())
    for name, blobs in outputs.items():
        assert blobs[0] == blobs[1], f"{name} output not byte-identical"

    # index round-trips: read(write(x)) = x, and write-read-write bytes
    for seed in range(20):
        index = random_index(seed, n=3, items=6, orders=(0, 1, 2))
        p1, p2 = tmp_path / "rt1.tsv", tmp_path / "rt2.tsv"
        write_index(index, p1)
        recovered = read_index(p1)
        assert recovered == index
        write_index(recovered, p2)
        assert p1.read_bytes() == p2.read_bytes()

    # pipeline-produced index round-trips too
    produced = read_index(tmp_path / "build-index1.out")
    write_index(produced, tmp_path / "rt3.tsv")
    assert read_index(tmp_path / "rt3.tsv") == produced
    announce("determinism: 5 CLI commands byte-identical across reruns; "
             "index round-trips exact on 20 random + 1 pipeline index")


# --------------------------------------------------------------------------
# Criterion 9: build-graph + build-index over a synthetic 10k-item,
# 1M-event log finishes in under 5 minutes (reference budget: 4 cores).
# --------------------------------------------------------------------------

def test_throughput_10k_items_1m_events(tmp_path):
    catalog, clusters = make_clustered_catalog(10_000, 625, 16, seed=0)
    log = make_behavior_log(clusters, n_users=12_500, events_per_user=80,
                            hop_prob=0.02, seed=1, related_clusters=2)
    assert len(log.records) == 1_000_000
    save_behavior_log(log, tmp_path / "log.tsv")
    save_catalog(catalog, tmp_path / "catalog.tsv")
    workers = min(4, os.cpu_count() or 1)
    cfg = PipelineConfig(workers=workers)

    start = time.time()
    g = build_graph(load_behavior_log(tmp_path / "log.tsv"), cfg.window,
                    cfg.bloom_bits_per_edge, cfg.bloom_hashes)
    save_graph(g, tmp_path / "graph.tsv")
    graph_done = time.time()

    g2 = load_graph(tmp_path / "graph.tsv", cfg.bloom_bits_per_edge,
                    cfg.bloom_hashes)
    catalog2 = load_catalog(tmp_path / "catalog.tsv")
    index = build_index(g2, catalog2, cfg, log=lambda _msg: None)
    write_index(index, tmp_path / "index.tsv")
    elapsed = time.time() - start

    assert len(index.entries) == len(g.nodes) * (cfg.max_order + 1)
    assert elapsed < 300.0, f"end-to-end took {elapsed:.0f}s >= 300s"
    announce(f"throughput: 10k items / 1M events end-to-end in {elapsed:.0f}s "
             f"< 300s (graph {graph_done - start:.0f}s, {workers} workers)")
