"""Motif statistics: triangle homophily, k-clique sampling, diversity counts.

All operations are read-only over an immutable graph and catalog and are
deterministic for a fixed seed.
"""

from dataclasses import dataclass

import numpy as np

from .catalog import ItemCatalog
from .errors import InvalidInputError, InvalidParameterError
from .graph import CooccurrenceGraph
from .triangles import mine_center

# graphs up to this many nodes get a dense adjacency fast path
_DENSE_NODE_LIMIT = 2000


@dataclass
class HomophilyReport:
    share_rate: float | None            # triangles whose items share >= 1 attribute
    per_attribute: dict[str, float | None]
    sample_size: int


@dataclass
class CliqueReport:
    per_k: dict[int, tuple[float, float | None]]  # k -> (occurrence, homophily)
    trials: int


def shared_attributes(catalog: ItemCatalog, items: list[str]) -> set[str]:
    """Attribute names on which every item carries the same non-null value."""
    shared = set()
    for name in catalog.schema:
        values = {catalog.attribute(v, name) for v in items}
        if len(values) == 1 and None not in values:
            shared.add(name)
    return shared


def attribute_share_stats(catalog: ItemCatalog, groups: list[list[str]],
                          ) -> tuple[float | None, dict[str, float | None]]:
    """Fraction of groups sharing any attribute, and per-attribute fractions."""
    if not groups:
        return None, {name: None for name in catalog.schema}
    any_count = 0
    per_attr = {name: 0 for name in catalog.schema}
    for group in groups:
        shared = shared_attributes(catalog, group)
        if shared:
            any_count += 1
        for name in shared:
            per_attr[name] += 1
    total = len(groups)
    return any_count / total, {k: v / total for k, v in per_attr.items()}


def homophily_stats(g: CooccurrenceGraph, catalog: ItemCatalog,
                    item_sample_size: int, triangles_per_item: int, seed: int,
                    max_order: int = 1,
                    neighbor_cap: int | None = 200) -> HomophilyReport:
    """Sample items, collect triangles around them, measure attribute sharing."""
    if item_sample_size < 1 or triangles_per_item < 1:
        raise InvalidParameterError("sample sizes must be >= 1")
    rng = np.random.default_rng(seed)
    nodes = g.sorted_nodes
    take = min(item_sample_size, len(nodes))
    items = rng.choice(len(nodes), size=take, replace=False)

    groups: list[list[str]] = []
    for idx in sorted(int(i) for i in items):
        mining = mine_center(g, nodes[idx], max_order, neighbor_cap)
        count = len(mining.tris)
        if count == 0:
            continue
        if count > triangles_per_item:
            chosen = sorted(rng.choice(count, size=triangles_per_item,
                                       replace=False))
        else:
            chosen = range(count)
        for t in chosen:
            groups.append(list(mining.nodes_of(int(t))))
    share, per_attr = attribute_share_stats(catalog, groups)
    return HomophilyReport(share, per_attr, len(groups))


def _sample_distinct(rng: np.random.Generator, n: int, m: int,
                     trials: int) -> np.ndarray:
    """(trials, m) node indices, distinct within each row."""
    draws = rng.integers(0, n, size=(trials, m))
    while True:
        bad = np.zeros(trials, dtype=bool)
        for a in range(m):
            for b in range(a + 1, m):
                bad |= draws[:, a] == draws[:, b]
        if not bad.any():
            return draws
        draws[bad] = rng.integers(0, n, size=(int(bad.sum()), m))


def _clique_trials(g: CooccurrenceGraph, ks: tuple[int, ...], trials: int,
                   seed: int, node_cap: int | None) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Per-trial clique indicators for each k, over shared nested samples.

    Each trial draws max(ks) distinct nodes; the k-clique check uses the
    first k of them, so estimates are monotone non-increasing in k by
    construction.
    """
    rng = np.random.default_rng(seed)
    nodes = list(g.sorted_nodes)
    if node_cap is not None and node_cap < len(nodes):
        keep = rng.choice(len(nodes), size=node_cap, replace=False)
        nodes = [nodes[i] for i in sorted(int(i) for i in keep)]
    if len(nodes) < max(ks):
        raise InvalidInputError(f"graph has {len(nodes)} nodes, need >= {max(ks)}")
    # draw the same number of nodes per trial for every k (5 when the graph
    # allows), so estimates for nested k share one seed stream and are
    # monotone non-increasing by construction
    m = min(max(5, max(ks)), len(nodes))
    draws = _sample_distinct(rng, len(nodes), m, trials)

    if len(nodes) <= _DENSE_NODE_LIMIT:
        dense = np.zeros((len(nodes), len(nodes)), dtype=bool)
        pos = {v: i for i, v in enumerate(nodes)}
        for a, b in g.edges:
            ia, ib = pos.get(a), pos.get(b)
            if ia is not None and ib is not None:
                dense[ia, ib] = dense[ib, ia] = True
        pair_ok = {(a, b): dense[draws[:, a], draws[:, b]]
                   for a in range(m) for b in range(a + 1, m)}
    else:
        pair_ok = {}
        for a in range(m):
            for b in range(a + 1, m):
                pair_ok[(a, b)] = np.fromiter(
                    (g.has_edge(nodes[i], nodes[j])
                     for i, j in zip(draws[:, a], draws[:, b])),
                    dtype=bool, count=trials)

    is_clique = np.zeros((len(ks), trials), dtype=bool)
    for row, k in enumerate(ks):
        ok = np.ones(trials, dtype=bool)
        for a in range(k):
            for b in range(a + 1, k):
                ok &= pair_ok[(a, b)]
        is_clique[row] = ok
    return is_clique, draws, nodes


def clique_probability(g: CooccurrenceGraph, k: int, trials: int, seed: int,
                       catalog: ItemCatalog | None = None,
                       node_cap: int | None = None) -> tuple[float, float | None]:
    """Monte Carlo estimate of the k-clique occurrence probability.

    Homophily is the fraction of sampled cliques whose k items all share
    at least one attribute value; None without a catalog or cliques.
    """
    if k < 2 or k > 5:
        raise InvalidParameterError(f"k must be in 2..5, got {k}")
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    report = clique_report(g, catalog, trials, seed, ks=(k,), node_cap=node_cap)
    return report.per_k[k]


def clique_report(g: CooccurrenceGraph, catalog: ItemCatalog | None,
                  trials: int, seed: int, ks: tuple[int, ...] = (2, 3, 4, 5),
                  node_cap: int | None = None) -> CliqueReport:
    if any(k < 2 or k > 5 for k in ks):
        raise InvalidParameterError(f"clique sizes must be in 2..5: {ks}")
    is_clique, draws, nodes = _clique_trials(g, ks, trials, seed, node_cap)
    per_k: dict[int, tuple[float, float | None]] = {}
    for row, k in enumerate(ks):
        hits = np.nonzero(is_clique[row])[0]
        prob = len(hits) / trials
        homophily = None
        if catalog is not None and len(hits):
            sharing = sum(
                1 for t in hits
                if shared_attributes(catalog, [nodes[i] for i in draws[t, :k]]))
            homophily = sharing / len(hits)
        per_k[k] = (prob, homophily)
    return CliqueReport(per_k, trials)


def diversity_metric(items: list[str], catalog: ItemCatalog,
                     attribute: str) -> int:
    """Distinct non-null values of one attribute across an item list."""
    if attribute not in catalog.schema:
        raise InvalidParameterError(f"unknown attribute: {attribute!r}")
    values = {catalog.attribute(v, attribute) for v in items}
    values.discard(None)
    return len(values)


@dataclass
class DiversityComparison:
    attribute: str
    items_sampled: int
    pooled: dict[str, int]            # method -> distinct values, all items pooled
    mean_per_item: dict[str, float]   # method -> mean distinct values per item


def diversity_comparison(g: CooccurrenceGraph, catalog: ItemCatalog,
                         attribute: str, item_sample_size: int, n: int,
                         theta: float, seed: int, max_order: int = 1,
                         neighbor_cap: int | None = 200) -> DiversityComparison:
    """Distinct attribute values reached by diversity-aware selection versus
    relevance-proportional sampling, at equal triangle budgets per item."""
    from .dpp import select_triangles, weight_sample
    from .triangles import triangle_feature, triangles_of_order

    if attribute not in catalog.schema:
        raise InvalidParameterError(f"unknown attribute: {attribute!r}")
    rng = np.random.default_rng(seed)
    nodes = g.sorted_nodes
    take = min(item_sample_size, len(nodes))
    chosen = sorted(int(i) for i in rng.choice(len(nodes), size=take, replace=False))

    pooled = {"dpp": set(), "weight": set()}
    per_item = {"dpp": [], "weight": []}
    examined = 0
    for idx in chosen:
        center = nodes[idx]
        mining = mine_center(g, center, max_order, neighbor_cap)
        item_values = {"dpp": set(), "weight": set()}
        found = False
        for k in range(max_order + 1):
            pool = triangles_of_order(mining, k)
            if not pool:
                continue
            found = True
            for t in pool:
                t.feature, t.zero_feature = triangle_feature(catalog, t.nodes)
            budget = min(n, len(pool))
            diverse = [s.triangle for s in select_triangles(pool, theta, n,
                                                            center=center)
                       if s.triangle.nodes[0] != s.triangle.nodes[2]]  # skip pseudo
            picks = {
                "dpp": diverse[:budget],
                "weight": weight_sample(pool, budget, int(rng.integers(2 ** 31))),
            }
            for method, tris in picks.items():
                members = {v for t in tris for v in t.nodes}
                values = {catalog.attribute(v, attribute) for v in members}
                values.discard(None)
                item_values[method] |= values
        if not found:
            continue
        examined += 1
        for method in ("dpp", "weight"):
            pooled[method] |= item_values[method]
            per_item[method].append(len(item_values[method]))
    return DiversityComparison(
        attribute, examined,
        {m: len(v) for m, v in pooled.items()},
        {m: (float(np.mean(v)) if v else 0.0) for m, v in per_item.items()})


def diversity_comparison_tsv(report: DiversityComparison) -> str:
    lines = [f"#attribute {report.attribute} items {report.items_sampled}",
             "method\tpooled_distinct\tmean_distinct_per_item"]
    for method in sorted(report.pooled):
        lines.append(f"{method}\t{report.pooled[method]}"
                     f"\t{report.mean_per_item[method]:.6f}")
    return "\n".join(lines) + "\n"


# -- report serialization -----------------------------------------------------

def homophily_report_tsv(report: HomophilyReport) -> str:
    def fmt(v):
        return "null" if v is None else format(v, ".6f")

    lines = [f"#samples {report.sample_size}", "attribute\tfraction",
             f"any\t{fmt(report.share_rate)}"]
    for name in sorted(report.per_attribute):
        lines.append(f"{name}\t{fmt(report.per_attribute[name])}")
    return "\n".join(lines) + "\n"


def clique_report_tsv(report: CliqueReport) -> str:
    def fmt(v):
        return "null" if v is None else format(v, ".6f")

    lines = [f"#trials {report.trials}", "k\toccurrence_probability\thomophily"]
    for k in sorted(report.per_k):
        prob, hom = report.per_k[k]
        lines.append(f"{k}\t{fmt(prob)}\t{fmt(hom)}")
    return "\n".join(lines) + "\n"
