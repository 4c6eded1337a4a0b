"""Diverse triangle selection through a determinantal point process.

The kernel couples per-triangle relevance with pairwise feature cosine
similarity; a trade-off parameter theta in (0,1) shifts mass between the
two. Subsets are scored by the determinant of the kernel restriction, and
greedy MAP inference picks them with incremental Cholesky updates.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .triangles import Triangle, pseudo_triangle

# marginal log-det gains below log(GAIN_FLOOR) count as minus infinity
GAIN_FLOOR = 1e-12


@dataclass
class DppKernel:
    L: np.ndarray          # N x N, positive semi-definite
    C: np.ndarray          # cosine similarity of triangle features
    r: np.ndarray          # relevances min-max scaled to [0, 1]
    theta: float
    alpha: float
    zero_rows: np.ndarray  # rows whose feature vector had zero norm

    @property
    def size(self) -> int:
        return self.L.shape[0]


@dataclass
class GreedySelection:
    indices: list[int]
    gains: list[float]     # log-det gain of each accepted step
    truncated: bool        # more items were requested than exist


@dataclass
class SelectedTriangle:
    triangle: Triangle
    rank: int
    padded: bool


def scale_relevance(relevance: np.ndarray) -> np.ndarray:
    """Min-max scale to [0, 1]; a constant vector maps to zeros."""
    relevance = np.asarray(relevance, dtype=np.float64)
    lo, hi = relevance.min(), relevance.max()
    if hi > lo:
        return (relevance - lo) / (hi - lo)
    return np.zeros_like(relevance)


def kernel_from_arrays(relevance: np.ndarray, features: np.ndarray,
                       theta: float) -> DppKernel:
    if not 0.0 < theta < 1.0:
        raise InvalidParameterError(f"theta must be in (0,1), got {theta}")
    features = np.asarray(features, dtype=np.float64)
    relevance = np.asarray(relevance, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] != relevance.shape[0]:
        raise InvalidInputError("relevance/feature shape mismatch")
    if features.shape[0] == 0:
        raise InvalidInputError("empty triangle set")
    norms = np.linalg.norm(features, axis=1)
    zero_rows = norms == 0.0
    unit = np.where(zero_rows, 1.0, norms)
    x = features / unit[:, None]
    cos = x @ x.T
    cos = (cos + cos.T) / 2.0
    cos[zero_rows, :] = 0.0
    cos[:, zero_rows] = 0.0
    np.fill_diagonal(cos, 1.0)

    alpha = theta / (2.0 * (1.0 - theta))
    r = scale_relevance(relevance)
    s = np.exp(alpha * r)
    kernel = s[:, None] * cos * s[None, :]
    return DppKernel(kernel, cos, r, theta, alpha, zero_rows)


def build_kernel(triangles: list[Triangle], theta: float) -> DppKernel:
    if not triangles:
        raise InvalidInputError("empty triangle set")
    for t in triangles:
        if t.feature is None:
            raise InvalidInputError(f"triangle {t.nodes} has no feature vector")
    features = np.stack([t.feature for t in triangles])
    relevance = np.array([t.relevance for t in triangles])
    return kernel_from_arrays(relevance, features, theta)


def subset_probability(kernel: DppKernel, subset: list[int]) -> float:
    """det(L_S) / det(L + I); the empty subset has determinant 1."""
    L = kernel.L
    num = float(np.linalg.det(L[np.ix_(subset, subset)])) if subset else 1.0
    return num / float(np.linalg.det(L + np.eye(L.shape[0])))


def greedy_map(kernel: DppKernel, n: int) -> GreedySelection:
    """Pick up to n indices by greedy log-det gain.

    Each step adds the index with the largest marginal gain
    log det(L_{S+j}) - log det(L_S), maintained incrementally through a
    rank-one Cholesky update; ties break toward the lowest index. Stops
    early once the best gain falls below log(GAIN_FLOOR).
    """
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    L = kernel.L
    size = L.shape[0]
    budget = min(n, size)
    cis = np.zeros((budget, size))
    di2s = np.array(np.diag(L), dtype=np.float64)
    indices: list[int] = []
    gains: list[float] = []
    while len(indices) < budget:
        j = int(np.argmax(di2s))
        best = di2s[j]
        if best < GAIN_FLOOR:
            break
        gains.append(math.log(best))
        t = len(indices)
        eis = (L[j] - cis[:t, j] @ cis[:t]) / math.sqrt(best)
        cis[t] = eis
        di2s -= eis * eis
        di2s[j] = -np.inf
        indices.append(j)
    return GreedySelection(indices, gains, truncated=n > size)


def pad_selection(selected: list[int], relevance: np.ndarray, n: int,
                  ) -> list[tuple[int | None, bool]]:
    """Fill to n rows: greedy picks, then highest-relevance leftovers,
    then None markers for pseudo rows. Second element flags padding."""
    rows: list[tuple[int | None, bool]] = [(i, False) for i in selected]
    chosen = set(selected)
    leftovers = sorted((i for i in range(len(relevance)) if i not in chosen),
                       key=lambda i: (-relevance[i], i))
    for i in leftovers:
        if len(rows) >= n:
            break
        rows.append((i, True))
    while len(rows) < n:
        rows.append((None, True))
    return rows[:n]


def select_triangles(triangles: list[Triangle], theta: float, n: int,
                     center: str | None = None,
                     feature_dim: int | None = None) -> list[SelectedTriangle]:
    """Greedy DPP selection padded to exactly n rows."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    if triangles:
        kernel = build_kernel(triangles, theta)
        picks = greedy_map(kernel, n).indices
        relevance = np.array([t.relevance for t in triangles])
        if feature_dim is None:
            feature_dim = len(triangles[0].feature)
        order = triangles[0].order
    else:
        picks, relevance, order = [], np.zeros(0), 0
    if center is None and len(triangles) < n:
        raise InvalidInputError("center id required to pad short selections")
    out = []
    for rank, (idx, padded) in enumerate(pad_selection(picks, relevance, n)):
        tri = triangles[idx] if idx is not None \
            else pseudo_triangle(center, order, feature_dim or 0)
        out.append(SelectedTriangle(tri, rank, padded))
    return out


def weight_sample(triangles: list[Triangle], n: int, seed: int) -> list[Triangle]:
    """Sample without replacement, probability proportional to relevance.

    Once only zero-relevance triangles remain, draws are uniform.
    """
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    relevance = np.array([t.relevance for t in triangles], dtype=np.float64)
    remaining = list(range(len(triangles)))
    picked: list[int] = []
    while remaining and len(picked) < n:
        weights = relevance[remaining]
        total = weights.sum()
        p = weights / total if total > 0 else None
        j = int(rng.choice(len(remaining), p=p))
        picked.append(remaining.pop(j))
    return [triangles[i] for i in picked]
