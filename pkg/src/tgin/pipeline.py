"""End-to-end index construction: extract, score, select, persist."""

import multiprocessing
import os
import sys

import numpy as np

from .catalog import ItemCatalog
from .config import PipelineConfig
from .dpp import greedy_map, kernel_from_arrays, pad_selection
from .graph import CooccurrenceGraph
from .index_io import IndexRow, TriangleIndex, format_relevance
from .triangles import mine_center

# entry payload: (item, order) -> [(a, b, c, relevance, padded), ...]
_RawRows = list[tuple[str, str, str, float, bool]]


def _quantize(value: float) -> float:
    # rows store what the file stores, so write/read round-trips exactly
    return float(format_relevance(value))


def _entries_for_center(g: CooccurrenceGraph, center: str,
                        feature_matrix: np.ndarray, feature_row: dict[str, int],
                        cfg: PipelineConfig) -> dict[tuple[str, int], _RawRows]:
    mining = mine_center(g, center, cfg.max_order, cfg.neighbor_cap)
    m = len(mining.candidates)
    d_f = feature_matrix.shape[1] if feature_matrix.size else 0
    rows_idx = np.array([feature_row.get(v, -1) for v in mining.candidates],
                        dtype=np.int64)
    cand_feats = np.zeros((m, d_f))
    known = rows_idx >= 0
    if known.any():
        cand_feats[known] = feature_matrix[rows_idx[known]]

    tris = mining.tris
    if len(tris):
        tri_feats = (cand_feats[tris[:, 0]] + cand_feats[tris[:, 1]]
                     + cand_feats[tris[:, 2]]) / 3.0
        norms = np.linalg.norm(tri_feats, axis=1)
        safe = np.where(norms == 0.0, 1.0, norms)
        tri_feats /= safe[:, None]

    out: dict[tuple[str, int], _RawRows] = {}
    pseudo = (center, center, center, 0.0, True)
    for k in range(cfg.max_order + 1):
        chosen = np.nonzero(mining.order == k)[0]
        if cfg.candidate_cap is not None and len(chosen) > cfg.candidate_cap:
            rel = mining.relevance[chosen]
            t = tris[chosen]
            ranked = np.lexsort((t[:, 2], t[:, 1], t[:, 0], -rel))
            chosen = chosen[ranked[:cfg.candidate_cap]]
        rows: _RawRows = []
        if len(chosen):
            rel = mining.relevance[chosen]
            kernel = kernel_from_arrays(rel, tri_feats[chosen], cfg.theta)
            picks = greedy_map(kernel, cfg.triangles_per_item).indices
            for idx, padded in pad_selection(picks, rel, cfg.triangles_per_item):
                if idx is None:
                    rows.append(pseudo)
                else:
                    a, b, c = mining.nodes_of(int(chosen[idx]))
                    rows.append((a, b, c, _quantize(float(rel[idx])), padded))
        else:
            rows = [pseudo] * cfg.triangles_per_item
        out[(center, k)] = rows
    return out


# worker state shared through fork; only read after the pool starts
_WORK: tuple | None = None


def _worker(centers: list[str]) -> dict[tuple[str, int], _RawRows]:
    g, feature_matrix, feature_row, cfg = _WORK
    out: dict[tuple[str, int], _RawRows] = {}
    for center in centers:
        out.update(_entries_for_center(g, center, feature_matrix, feature_row, cfg))
    return out


def build_index(g: CooccurrenceGraph, catalog: ItemCatalog,
                cfg: PipelineConfig, log=None) -> TriangleIndex:
    """Select diverse triangles for every (graph node, order) pair."""
    cfg.validate()
    log = log or (lambda msg: print(msg, file=sys.stderr))

    missing = sorted(v for v in g.nodes if v not in catalog)
    if missing:
        shown = ", ".join(missing[:10]) + ("..." if len(missing) > 10 else "")
        log(f"warning: {len(missing)} graph items lack catalog features "
            f"(zero-vector placeholder used): {shown}")
    feature_matrix, feature_row = catalog.feature_matrix()

    centers = list(g.sorted_nodes)
    workers = cfg.workers or os.cpu_count() or 1
    raw: dict[tuple[str, int], _RawRows] = {}
    if workers > 1 and len(centers) > 64:
        global _WORK
        _WORK = (g, feature_matrix, feature_row, cfg)
        chunk = max(16, len(centers) // (workers * 8))
        batches = [centers[i:i + chunk] for i in range(0, len(centers), chunk)]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            for part in pool.imap_unordered(_worker, batches):
                raw.update(part)
        _WORK = None
    else:
        for center in centers:
            raw.update(_entries_for_center(g, center, feature_matrix,
                                           feature_row, cfg))

    entries = {
        key: [IndexRow(a, b, c, rel, rank, padded)
              for rank, (a, b, c, rel, padded) in enumerate(rows)]
        for key, rows in raw.items()
    }
    index = TriangleIndex(cfg.triangles_per_item,
                          list(range(cfg.max_order + 1)), entries)
    padded_entries = sum(1 for rows in entries.values()
                         if any(r.padded for r in rows))
    log(f"index: {len(centers)} items x {cfg.max_order + 1} orders, "
        f"{padded_entries} entries needed padding")
    return index
