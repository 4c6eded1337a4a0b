"""Built-in oracle suites for `tgin selftest`.

Each check rebuilds expected answers through an independent route (cubic
brute force, dense determinants, exhaustive replay) on generated fixtures
and compares the production path against it.
"""

import itertools

import numpy as np

from .dpp import GAIN_FLOOR, greedy_map, kernel_from_arrays
from .graph import CooccurrenceGraph, edge_key
from .synth import make_er_graph
from .triangles import mine_center, triangles_of_order


def brute_force_triangles(g: CooccurrenceGraph, center: str, radius: int,
                          ) -> dict[int, set[tuple[str, str, str]]]:
    """All pairwise-connected triples in the K-hop ball, bucketed by the
    minimum distance to the center. Cubic in the neighborhood size."""
    dist = dict(g.neighbors_within(center, radius))
    dist[center] = 0
    members = sorted(dist)
    buckets: dict[int, set[tuple[str, str, str]]] = {k: set() for k in range(radius + 1)}
    for a, b, c in itertools.combinations(members, 3):
        if g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c):
            buckets[min(dist[a], dist[b], dist[c])].add((a, b, c))
    return buckets


def check_triangle_extraction(n_graphs: int = 4, n: int = 100, p: float = 0.06,
                              centers_per_graph: int = 5, radius: int = 2,
                              seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    checked = 0
    for gi in range(n_graphs):
        g = make_er_graph(n, p, seed=seed + gi)
        nodes = g.sorted_nodes
        for ci in rng.choice(len(nodes), size=centers_per_graph, replace=False):
            center = nodes[int(ci)]
            expected = brute_force_triangles(g, center, radius)
            mining = mine_center(g, center, radius)
            for k in range(radius + 1):
                got = {t.nodes for t in triangles_of_order(mining, k)}
                if got != expected[k]:
                    return False, (f"graph seed {seed + gi}, center {center}, "
                                   f"k={k}: {len(got)} vs {len(expected[k])} triangles")
            checked += 1
    return True, f"{checked} centers matched brute force"


def check_dpp_greedy(n_kernels: int = 20, max_n: int = 10, picks: int = 4,
                     seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    for trial in range(n_kernels):
        size = int(rng.integers(3, max_n + 1))
        feats = rng.normal(size=(size, 6))
        rel = rng.uniform(0.0, 5.0, size=size)
        kernel = kernel_from_arrays(rel, feats, theta=0.5)
        result = greedy_map(kernel, picks)
        chosen: list[int] = []
        for step, j in enumerate(result.indices):
            best_gain, best_idx = -np.inf, None
            base = np.linalg.slogdet(
                kernel.L[np.ix_(chosen, chosen)])[1] if chosen else 0.0
            for cand in range(size):
                if cand in chosen:
                    continue
                sub = chosen + [cand]
                sign, logdet = np.linalg.slogdet(kernel.L[np.ix_(sub, sub)])
                gain = logdet - base if sign > 0 else -np.inf
                if gain > best_gain + 1e-12:
                    best_gain, best_idx = gain, cand
            if best_gain < np.log(GAIN_FLOOR):
                return False, f"kernel {trial}: greedy continued past the gain floor"
            if j != best_idx:
                return False, f"kernel {trial} step {step}: picked {j}, oracle {best_idx}"
            if abs(result.gains[step] - best_gain) > 1e-9 * max(1.0, abs(best_gain)):
                return False, (f"kernel {trial} step {step}: gain "
                               f"{result.gains[step]} vs dense {best_gain}")
            chosen.append(j)
    return True, f"{n_kernels} kernels matched dense determinant ratios"


def check_bloom_replay(n: int = 400, p: float = 0.02, absent_pairs: int = 20000,
                       seed: int = 0) -> tuple[bool, str]:
    g = make_er_graph(n, p, seed=seed)
    for a, b in g.edges:
        if not g.has_edge(a, b) or not g.has_edge(b, a):
            return False, f"false negative on stored edge ({a}, {b})"
    rng = np.random.default_rng(seed + 1)
    nodes = g.sorted_nodes
    false_pos = tested = 0
    while tested < absent_pairs:
        i, j = rng.integers(0, len(nodes), size=2)
        if i == j:
            continue
        pair = edge_key(nodes[int(i)], nodes[int(j)])
        if pair in g.edges:
            continue
        tested += 1
        from .graph import _filter_key
        if g.membership_filter.might_contain(_filter_key(pair)):
            false_pos += 1
    rate = false_pos / tested
    limit = 2.0 * g.membership_filter.design_false_positive_rate
    if rate > limit:
        return False, f"false-positive rate {rate:.4f} above {limit:.4f}"
    return True, f"0 false negatives; false-positive rate {rate:.4f}"


def run_selftest(fast: bool = False) -> int:
    checks = [
        ("triangle-extraction-vs-brute-force",
         lambda: check_triangle_extraction(n_graphs=2 if fast else 4)),
        ("dpp-greedy-vs-dense-determinants",
         lambda: check_dpp_greedy(n_kernels=5 if fast else 20)),
        ("bloom-filter-replay",
         lambda: check_bloom_replay(absent_pairs=5000 if fast else 20000)),
    ]
    failures = 0
    for name, check in checks:
        ok, detail = check()
        status = "PASS" if ok else "FAIL"
        print(f"{status} {name}: {detail}")
        failures += 0 if ok else 1
    return 1 if failures else 0
