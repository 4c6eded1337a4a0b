"""k-order triangle mining around a center item.

A triangle is a pairwise-connected item triple inside the center's
K-hop neighborhood; its order is the minimum shortest-path distance of
its three nodes to the center. `mine_center` does the heavy lifting on
integer arrays; `extract_triangles`/`score_triangle` expose per-triangle
objects on top of it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .catalog import ItemCatalog
from .errors import (
    InternalInvariantError,
    InvalidInputError,
    InvalidParameterError,
    UnknownItemError,
)
from .graph import CooccurrenceGraph

# induced neighborhoods up to this size use one cubic boolean tensor;
# larger ones fall back to a per-node pair scan
_DENSE_TRIPLE_LIMIT = 100

DEFAULT_RADIUS = 2


@dataclass
class Triangle:
    nodes: tuple[str, str, str]  # ascending item ids
    order: int
    inner_weight: float
    outer_weight: float
    relevance: float
    feature: np.ndarray | None = None
    zero_feature: bool = False


@dataclass
class TriangleSet:
    center: str
    order: int
    triangles: list[Triangle]


@dataclass
class CenterMining:
    """All triangles in one center's K-hop neighborhood, as arrays."""

    center: str
    candidates: list[str]     # sorted item ids, center included
    dist: np.ndarray          # (m,) hop distance per candidate, center = 0
    tris: np.ndarray          # (T, 3) candidate indices, each row ascending
    order: np.ndarray         # (T,) min distance to center
    inner: np.ndarray         # (T,)
    outer: np.ndarray         # (T,)
    relevance: np.ndarray     # (T,)

    def nodes_of(self, t: int) -> tuple[str, str, str]:
        i, j, k = self.tris[t]
        return (self.candidates[i], self.candidates[j], self.candidates[k])


def _bfs_indices(g: CooccurrenceGraph, center_idx: int, radius: int,
                 csr) -> dict[int, int]:
    dist = {center_idx: 0}
    frontier = [center_idx]
    for d in range(1, radius + 1):
        nxt = []
        for u in frontier:
            for v in csr.neighbors[csr.indptr[u]:csr.indptr[u + 1]]:
                v = int(v)
                if v not in dist:
                    dist[v] = d
                    nxt.append(v)
        if not nxt:
            break
        frontier = nxt
    return dist


def _enumerate_triples(adj: np.ndarray) -> np.ndarray:
    """Rows (i, j, k) with i < j < k and all three pairs adjacent."""
    m = adj.shape[0]
    if m < 3:
        return np.zeros((0, 3), dtype=np.int64)
    if m <= _DENSE_TRIPLE_LIMIT:
        idx = np.arange(m)
        increasing = (idx[:, None, None] < idx[None, :, None]) \
            & (idx[None, :, None] < idx[None, None, :])
        closed = adj[:, :, None] & adj[:, None, :] & adj[None, :, :]
        return np.argwhere(closed & increasing)
    chunks = []
    for i in range(m - 2):
        nbrs = np.nonzero(adj[i, i + 1:])[0] + i + 1
        if len(nbrs) < 2:
            continue
        jj, kk = np.nonzero(adj[nbrs][:, nbrs])
        upper = jj < kk  # symmetric submatrix lists each pair twice
        jj, kk = jj[upper], kk[upper]
        if len(jj):
            chunks.append(np.column_stack(
                [np.full(len(jj), i, dtype=np.int64), nbrs[jj], nbrs[kk]]))
    if not chunks:
        return np.zeros((0, 3), dtype=np.int64)
    tris = np.concatenate(chunks)
    return tris[np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0]))]


def mine_center(g: CooccurrenceGraph, center: str, radius: int = DEFAULT_RADIUS,
                neighbor_cap: int | None = None) -> CenterMining:
    """Enumerate and score every triangle within `radius` hops of center."""
    if center not in g.nodes:
        raise UnknownItemError(f"unknown item: {center!r}")
    if radius < 0:
        raise InvalidParameterError("radius must be >= 0")
    csr = g.csr(neighbor_cap)
    center_idx = g.node_index(center)
    dist_map = _bfs_indices(g, center_idx, radius, csr)

    cand_idx = sorted(dist_map)  # global index order == lexicographic id order
    m = len(cand_idx)
    candidates = [g.sorted_nodes[i] for i in cand_idx]
    dist = np.array([dist_map[i] for i in cand_idx], dtype=np.int64)

    pos = np.full(len(g.sorted_nodes), -1, dtype=np.int64)
    pos[cand_idx] = np.arange(m)
    adj = np.zeros((m, m), dtype=bool)
    weight = np.zeros((m, m), dtype=np.float64)
    for local, u in enumerate(cand_idx):
        beg, end = csr.indptr[u], csr.indptr[u + 1]
        loc = pos[csr.neighbors[beg:end]]
        keep = loc >= 0
        adj[local, loc[keep]] = True
        weight[local, loc[keep]] = csr.weights[beg:end][keep]
    # capped lists may keep an edge on one endpoint only
    adj |= adj.T
    weight = np.maximum(weight, weight.T)

    tris = _enumerate_triples(adj)
    i, j, k = tris[:, 0], tris[:, 1], tris[:, 2]
    order = np.minimum(np.minimum(dist[i], dist[j]), dist[k]) if len(tris) \
        else np.zeros(0, dtype=np.int64)
    inner = (weight[i, j] + weight[i, k] + weight[j, k]) / 3.0
    center_w = weight[int(pos[center_idx])]
    outer_num = center_w[i] + center_w[j] + center_w[k]
    outer_den = (dist[i] + dist[j] + dist[k]).astype(np.float64)
    if np.any(outer_den == 0):
        raise InternalInvariantError("triangle with zero distance sum")
    outer = outer_num / outer_den
    relevance = np.sqrt(inner * outer)
    return CenterMining(center, candidates, dist, tris, order, inner, outer,
                        relevance)


def triangles_of_order(mining: CenterMining, k: int) -> list[Triangle]:
    out = []
    for t in np.nonzero(mining.order == k)[0]:
        out.append(Triangle(mining.nodes_of(int(t)), k,
                            float(mining.inner[t]), float(mining.outer[t]),
                            float(mining.relevance[t])))
    return out


def extract_triangles(g: CooccurrenceGraph, center: str, k: int,
                      radius: int = DEFAULT_RADIUS,
                      neighbor_cap: int | None = None) -> TriangleSet:
    """Triangles whose minimum distance to center is exactly k."""
    if center not in g.nodes:
        raise UnknownItemError(f"unknown item: {center!r}")
    if not 0 <= k <= radius:
        raise InvalidParameterError(f"order k={k} outside 0..{radius}")
    mining = mine_center(g, center, radius, neighbor_cap)
    return TriangleSet(center, k, triangles_of_order(mining, k))


def score_triangle(g: CooccurrenceGraph, nodes: tuple[str, str, str],
                   center: str, dist: dict[str, int]) -> Triangle:
    """Inner/outer weights and relevance of one pairwise-connected triple."""
    a, b, c = sorted(nodes)
    pair_weights = [g.edge_weight(a, b), g.edge_weight(a, c), g.edge_weight(b, c)]
    if any(w == 0 for w in pair_weights):
        raise InvalidInputError(f"{(a, b, c)} is not a triangle")
    inner = sum(pair_weights) / 3.0
    num = sum(0 if v == center else g.edge_weight(v, center) for v in (a, b, c))
    den = sum(dist[v] for v in (a, b, c))
    if den == 0:
        raise InternalInvariantError("triangle with zero distance sum")
    outer = num / den
    order = min(dist[v] for v in (a, b, c))
    return Triangle((a, b, c), order, inner, outer, math.sqrt(inner * outer))


def triangle_feature(catalog: ItemCatalog, nodes: tuple[str, str, str],
                     ) -> tuple[np.ndarray, bool]:
    """Mean of the three item features, L2-normalized.

    A zero mean vector is returned unscaled with the flag set.
    """
    vecs = [catalog.feature(v) for v in nodes]
    mean = (vecs[0] + vecs[1] + vecs[2]) / 3.0
    norm = np.linalg.norm(mean)
    if norm == 0.0:
        return mean, True
    return mean / norm, False


def pseudo_triangle(center: str, order: int, feature_dim: int) -> Triangle:
    """Placeholder emitted when an item has no real triangles to offer."""
    return Triangle((center, center, center), order, 0.0, 0.0, 0.0,
                    feature=np.zeros(feature_dim), zero_feature=True)
