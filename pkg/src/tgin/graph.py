"""Item-item co-occurrence graph built from user behavior logs.

Edges link items that appear within a sliding window of one user's
time-ordered behavior sequence; weights count co-occurring index pairs.
Edge membership is answered by a hash map behind an optional Bloom
prefilter. A built graph is immutable and safe for concurrent reads.
"""

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .bloom import BloomFilter, DEFAULT_BITS_PER_KEY, DEFAULT_NUM_HASHES
from .errors import (
    IntegrityError,
    InvalidInputError,
    InvalidParameterError,
    ParseError,
    UnknownItemError,
)

TRAIN_SPLIT = "train"
TEST_SPLIT = "test"


@dataclass(frozen=True)
class BehaviorRecord:
    user_id: str
    item_id: str
    timestamp: int
    split: str = TRAIN_SPLIT


@dataclass
class BehaviorLog:
    records: list[BehaviorRecord]

    def train_sequences(self) -> dict[str, list[str]]:
        """Per-user item sequences from the training split.

        Sequences are sorted by timestamp; ties keep input order.
        """
        by_user: dict[str, list[tuple[int, int, str]]] = defaultdict(list)
        for pos, rec in enumerate(self.records):
            if rec.split == TRAIN_SPLIT:
                by_user[rec.user_id].append((rec.timestamp, pos, rec.item_id))
        return {
            user: [item for _, _, item in sorted(entries)]
            for user, entries in by_user.items()
        }


def edge_key(a: str, b: str) -> tuple[str, str]:
    """Canonical unordered pair key (lexicographically ascending)."""
    return (a, b) if a < b else (b, a)


def _filter_key(pair: tuple[str, str]) -> bytes:
    return f"{pair[0]}\t{pair[1]}".encode()


@dataclass
class _Csr:
    """Integer adjacency in compressed sparse rows, aligned to sorted nodes."""

    indptr: np.ndarray
    neighbors: np.ndarray
    weights: np.ndarray


class CooccurrenceGraph:
    """Weighted undirected item graph with O(1)-expected edge membership."""

    def __init__(self, edges: dict[tuple[str, str], int], nodes=None, window: int = 0,
                 bloom_bits_per_edge: int = DEFAULT_BITS_PER_KEY,
                 bloom_hashes: int = DEFAULT_NUM_HASHES,
                 use_bloom: bool = True):
        for (a, b), w in edges.items():
            if a >= b:
                raise IntegrityError(f"edge key not canonical: {(a, b)}")
            if w < 1:
                raise IntegrityError(f"edge weight < 1 for {(a, b)}")
        self.edges = dict(edges)
        node_set = {v for pair in edges for v in pair}
        if nodes is not None:
            node_set |= set(nodes)
        self.nodes = frozenset(node_set)
        self.window = window

        adjacency: dict[str, list[str]] = {v: [] for v in node_set}
        for a, b in self.edges:
            adjacency[a].append(b)
            adjacency[b].append(a)
        self.adjacency: dict[str, tuple[str, ...]] = {
            v: tuple(sorted(nbrs)) for v, nbrs in adjacency.items()
        }

        self.membership_filter: BloomFilter | None = None
        if use_bloom:
            bf = BloomFilter(len(self.edges), bloom_bits_per_edge, bloom_hashes)
            for pair in self.edges:
                bf.add(_filter_key(pair))
            self.membership_filter = bf

        self._sorted_nodes: tuple[str, ...] = tuple(sorted(node_set))
        self._node_pos = {v: i for i, v in enumerate(self._sorted_nodes)}
        self._csr_cache: dict[int | None, _Csr] = {}

    # -- queries ---------------------------------------------------------

    def has_edge(self, a: str, b: str) -> bool:
        if a == b:
            return False
        pair = edge_key(a, b)
        if self.membership_filter is not None:
            if not self.membership_filter.might_contain(_filter_key(pair)):
                return False
        return pair in self.edges

    def edge_weight(self, a: str, b: str) -> int:
        if a == b:
            return 0
        return self.edges.get(edge_key(a, b), 0)

    def neighbors_within(self, v: str, radius: int) -> dict[str, int]:
        """Nodes at unweighted shortest-path distance 1..radius from v."""
        if v not in self.nodes:
            raise UnknownItemError(f"unknown item: {v!r}")
        if radius < 1:
            raise InvalidParameterError("radius must be >= 1")
        dist: dict[str, int] = {v: 0}
        frontier = [v]
        for d in range(1, radius + 1):
            nxt = []
            for u in frontier:
                for w in self.adjacency[u]:
                    if w not in dist:
                        dist[w] = d
                        nxt.append(w)
            if not nxt:
                break
            frontier = nxt
        del dist[v]
        return dist

    @property
    def sorted_nodes(self) -> tuple[str, ...]:
        return self._sorted_nodes

    def node_index(self, v: str) -> int:
        try:
            return self._node_pos[v]
        except KeyError:
            raise UnknownItemError(f"unknown item: {v!r}") from None

    def csr(self, neighbor_cap: int | None = None) -> _Csr:
        """Integer CSR adjacency; per-node lists optionally truncated to the
        top-`neighbor_cap` neighbors by (weight desc, item id asc)."""
        cached = self._csr_cache.get(neighbor_cap)
        if cached is not None:
            return cached
        pos = self._node_pos
        n = len(self._sorted_nodes)
        indptr = np.zeros(n + 1, dtype=np.int64)
        nbr_chunks: list[np.ndarray] = []
        w_chunks: list[np.ndarray] = []
        for i, v in enumerate(self._sorted_nodes):
            nbrs = self.adjacency[v]
            ws = [self.edges[edge_key(v, u)] for u in nbrs]
            if neighbor_cap is not None and len(nbrs) > neighbor_cap:
                keep = sorted(range(len(nbrs)), key=lambda j: (-ws[j], nbrs[j]))
                keep = sorted(keep[:neighbor_cap])
                nbrs = [nbrs[j] for j in keep]
                ws = [ws[j] for j in keep]
            nbr_chunks.append(np.fromiter((pos[u] for u in nbrs), dtype=np.int32,
                                          count=len(nbrs)))
            w_chunks.append(np.asarray(ws, dtype=np.float64))
            indptr[i + 1] = indptr[i] + len(nbrs)
        neighbors = (np.concatenate(nbr_chunks) if nbr_chunks
                     else np.zeros(0, dtype=np.int32))
        weights = (np.concatenate(w_chunks) if w_chunks
                   else np.zeros(0, dtype=np.float64))
        out = _Csr(indptr, neighbors, weights)
        self._csr_cache[neighbor_cap] = out
        return out


def build_graph(log: BehaviorLog, window: int,
                bloom_bits_per_edge: int = DEFAULT_BITS_PER_KEY,
                bloom_hashes: int = DEFAULT_NUM_HASHES,
                use_bloom: bool = True) -> CooccurrenceGraph:
    """Count co-occurring index pairs within a sliding window per user.

    Each unordered pair of distinct items at index distance < window in a
    user's time-sorted training sequence contributes exactly 1 per index
    pair; overlapping window placements do not double-count.
    """
    if window < 2:
        raise InvalidParameterError(f"window must be >= 2, got {window}")
    if not log.records:
        raise InvalidInputError("behavior log is empty")
    sequences = log.train_sequences()
    if not sequences:
        raise InvalidInputError("no training records")

    weights: dict[tuple[str, str], int] = defaultdict(int)
    nodes: set[str] = set()
    for user in sorted(sequences):
        seq = sequences[user]
        nodes.update(seq)
        m = len(seq)
        for i in range(m):
            a = seq[i]
            for j in range(i + 1, min(i + window, m)):
                b = seq[j]
                if a != b:
                    weights[edge_key(a, b)] += 1
    return CooccurrenceGraph(dict(weights), nodes=nodes, window=window,
                             bloom_bits_per_edge=bloom_bits_per_edge,
                             bloom_hashes=bloom_hashes, use_bloom=use_bloom)


# -- behavior log file format ------------------------------------------------
# UTF-8 TSV, one record per line: user_id  item_id  timestamp  split

def load_behavior_log(path) -> BehaviorLog:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ParseError(path, line_no,
                                 f"expected 4 tab-separated fields, got {len(parts)}")
            user, item, ts, split = parts
            if split not in (TRAIN_SPLIT, TEST_SPLIT):
                raise ParseError(path, line_no, f"bad split value: {split!r}")
            try:
                records.append(BehaviorRecord(user, item, int(ts), split))
            except ValueError:
                raise ParseError(path, line_no, f"bad timestamp: {ts!r}") from None
    return BehaviorLog(records)


def save_behavior_log(log: BehaviorLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in log.records:
            fh.write(f"{rec.user_id}\t{rec.item_id}\t{rec.timestamp}\t{rec.split}\n")


# -- graph file format --------------------------------------------------------
# header `#nodes N #edges M window W`, optional `#isolated\t<item>` lines for
# nodes without edges, then `item_a\titem_b\tweight` lines with item_a < item_b,
# sorted; byte-identical for identical graphs.

def save_graph(g: CooccurrenceGraph, path) -> None:
    isolated = sorted(v for v in g.nodes if not g.adjacency[v])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#nodes {len(g.nodes)} #edges {len(g.edges)} window {g.window}\n")
        for v in isolated:
            fh.write(f"#isolated\t{v}\n")
        for a, b in sorted(g.edges):
            fh.write(f"{a}\t{b}\t{g.edges[(a, b)]}\n")


def load_graph(path, bloom_bits_per_edge: int = DEFAULT_BITS_PER_KEY,
               bloom_hashes: int = DEFAULT_NUM_HASHES,
               use_bloom: bool = True) -> CooccurrenceGraph:
    edges: dict[tuple[str, str], int] = {}
    isolated: list[str] = []
    header = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line_no == 1:
                parts = line.split()
                if (len(parts) != 6 or parts[0] != "#nodes" or parts[2] != "#edges"
                        or parts[4] != "window"):
                    raise ParseError(path, line_no, "bad graph header")
                try:
                    header = (int(parts[1]), int(parts[3]), int(parts[5]))
                except ValueError:
                    raise ParseError(path, line_no, "bad graph header") from None
                continue
            if line.startswith("#isolated\t"):
                isolated.append(line.split("\t", 1)[1])
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(path, line_no,
                                 f"expected 3 tab-separated fields, got {len(parts)}")
            a, b, w = parts
            if a >= b:
                raise ParseError(path, line_no, f"edge not in canonical order: {a!r}, {b!r}")
            try:
                weight = int(w)
            except ValueError:
                raise ParseError(path, line_no, f"bad weight: {w!r}") from None
            if (a, b) in edges:
                raise ParseError(path, line_no, f"duplicate edge: {a!r}, {b!r}")
            edges[(a, b)] = weight
    if header is None:
        raise ParseError(path, 1, "missing graph header")
    n_nodes, n_edges, window = header
    g = CooccurrenceGraph(edges, nodes=isolated, window=window,
                          bloom_bits_per_edge=bloom_bits_per_edge,
                          bloom_hashes=bloom_hashes, use_bloom=use_bloom)
    if len(g.edges) != n_edges:
        raise IntegrityError(f"{path}: header says {n_edges} edges, found {len(g.edges)}")
    if len(g.nodes) != n_nodes:
        raise IntegrityError(f"{path}: header says {n_nodes} nodes, found {len(g.nodes)}")
    return g
