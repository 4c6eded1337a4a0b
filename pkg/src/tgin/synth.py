"""Synthetic catalogs, behavior logs and graphs for tests, demos and selftest.

Everything here is seeded and deterministic. Item ids are zero-padded so
lexicographic order matches numeric order.
"""

import numpy as np

from .catalog import ItemCatalog
from .graph import (
    BehaviorLog,
    BehaviorRecord,
    CooccurrenceGraph,
    TEST_SPLIT,
    TRAIN_SPLIT,
    edge_key,
)
from .triangles import Triangle, triangle_feature


def item_id(i: int) -> str:
    return f"i{i:06d}"


def make_clustered_catalog(n_items: int, n_clusters: int, feature_dim: int = 16,
                           seed: int = 0, noise: float = 0.15,
                           missing_rate: float = 0.05) -> tuple[ItemCatalog, list[list[str]]]:
    """Catalog whose attributes and features follow planted item clusters.

    Returns the catalog and the cluster membership lists. `category`,
    `keyword` and `store` are cluster-determined, `brand` is drawn from a
    global pool and `price` is continuous (bucketed to deciles downstream).
    """
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(n_clusters, feature_dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    n_brands = max(4, n_clusters // 2)

    attributes: dict[str, dict[str, str | None]] = {}
    features: dict[str, np.ndarray] = {}
    clusters: list[list[str]] = [[] for _ in range(n_clusters)]
    for i in range(n_items):
        c = i % n_clusters
        item = item_id(i)
        clusters[c].append(item)
        attrs: dict[str, str | None] = {
            "category": f"cat{c:04d}",
            "keyword": f"kw{c:04d}",
            "store": f"st{c % max(1, n_clusters // 2):04d}",
            "brand": f"b{int(rng.integers(n_brands)):04d}",
            "price": format(float(np.exp(rng.normal(3.0, 0.8))), ".4f"),
        }
        for name in ("brand", "store"):
            if rng.random() < missing_rate:
                attrs[name] = None
        attributes[item] = attrs
        features[item] = centers[c] + noise * rng.normal(size=feature_dim)
    from .catalog import bucket_continuous_attributes
    attributes, bucketed = bucket_continuous_attributes(attributes)
    return ItemCatalog(attributes, features, bucketed), clusters


def make_behavior_log(clusters: list[list[str]], n_users: int,
                      events_per_user: int, hop_prob: float = 0.05,
                      seed: int = 0, test_user_fraction: float = 0.1,
                      related_clusters: int | None = None) -> BehaviorLog:
    """Users walk inside a home cluster, occasionally hopping elsewhere.

    With `related_clusters` set, hops stay within that many ring-adjacent
    clusters instead of going anywhere, keeping neighborhoods local the way
    real interest domains do.
    """
    rng = np.random.default_rng(seed)
    n_clusters = len(clusters)
    records: list[BehaviorRecord] = []
    n_test = int(n_users * test_user_fraction)
    for u in range(n_users):
        user = f"u{u:06d}"
        split = TEST_SPLIT if u >= n_users - n_test else TRAIN_SPLIT
        home = int(rng.integers(n_clusters))
        ts = 1_600_000_000 + u
        for t in range(events_per_user):
            c = home
            if rng.random() < hop_prob:
                if related_clusters is None:
                    c = int(rng.integers(n_clusters))
                else:
                    step = int(rng.integers(1, related_clusters + 1))
                    sign = 1 if rng.random() < 0.5 else -1
                    c = (home + sign * step) % n_clusters
            pool = clusters[c]
            item = pool[int(rng.integers(len(pool)))]
            records.append(BehaviorRecord(user, item, ts + t * 60, split))
    return BehaviorLog(records)


def make_er_graph(n: int, p: float, seed: int = 0, max_weight: int = 1,
                  use_bloom: bool = True) -> CooccurrenceGraph:
    """Erdős–Rényi item graph with unit (or random integer) edge weights."""
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, 1)
    rows, cols = np.nonzero(upper)
    edges: dict[tuple[str, str], int] = {}
    for a, b in zip(rows, cols):
        w = 1 if max_weight <= 1 else int(rng.integers(1, max_weight + 1))
        edges[(item_id(int(a)), item_id(int(b)))] = w
    nodes = [item_id(i) for i in range(n)]
    return CooccurrenceGraph(edges, nodes=nodes, window=0, use_bloom=use_bloom)


def make_planted_graph(clusters: list[list[str]], intra_p: float = 0.7,
                       inter_p: float = 0.01, seed: int = 0,
                       intra_weight: tuple[int, int] = (3, 12),
                       inter_weight: tuple[int, int] = (1, 2),
                       use_bloom: bool = True) -> CooccurrenceGraph:
    """Dense edges inside clusters, sparse light edges across them."""
    rng = np.random.default_rng(seed)
    items = [v for cluster in clusters for v in cluster]
    membership = {v: c for c, cluster in enumerate(clusters) for v in cluster}
    edges: dict[tuple[str, str], int] = {}
    for i, a in enumerate(items):
        for b in items[i + 1:]:
            same = membership[a] == membership[b]
            p = intra_p if same else inter_p
            if rng.random() < p:
                lo, hi = intra_weight if same else inter_weight
                edges[edge_key(a, b)] = int(rng.integers(lo, hi + 1))
    return CooccurrenceGraph(edges, nodes=items, window=0, use_bloom=use_bloom)


def make_clustered_triangles(catalog: ItemCatalog, clusters: list[list[str]],
                             per_cluster: int, seed: int = 0,
                             hot_cluster: int = 0,
                             hot_boost: float = 8.0) -> list[Triangle]:
    """Candidate triangles drawn inside clusters, one cluster boosted.

    Relevances of the hot cluster dominate, so relevance-proportional
    samplers concentrate there while diversity-aware selection spreads out.
    """
    rng = np.random.default_rng(seed)
    out: list[Triangle] = []
    for c, members in enumerate(clusters):
        if len(members) < 3:
            continue
        for _ in range(per_cluster):
            pick = rng.choice(len(members), size=3, replace=False)
            nodes = tuple(sorted(members[i] for i in pick))
            base = float(rng.uniform(1.0, 2.0))
            if c == hot_cluster:
                base *= hot_boost
            feature, zero = triangle_feature(catalog, nodes)
            out.append(Triangle(nodes, 0, base, base, base, feature, zero))
    return out
