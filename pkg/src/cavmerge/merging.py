"""Single-linkage merging of initial clusters on inverse scores.

The distance between clusters ``i`` and ``j`` is ``1 / S[i, j]`` with
``1 / inf = 0`` and ``1 / 0 = inf``, so forced links merge first and pairs
with no score never merge directly (they can still join through a chain).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._errors import InvalidArgumentError
from .kmeans import canonicalize_labels
from .scoring import ScoreMatrix

__all__ = [
    "Dendrogram",
    "FinalClustering",
    "build_dendrogram",
    "cut_by_count",
    "cut_by_threshold",
    "inverse_scores",
]


@dataclass(frozen=True)
class Dendrogram:
    """Merge sequence over ``leaf_count`` leaves.

    ``merges[s] = (left, right, height)``; ids below ``leaf_count`` are
    leaves and id ``leaf_count + s`` is the cluster formed at step ``s``.
    Heights never decrease.
    """

    merges: tuple
    leaf_count: int

    @property
    def heights(self) -> np.ndarray:
        return np.array([h for _, _, h in self.merges], dtype=np.float64)


@dataclass(frozen=True)
class FinalClustering:
    cluster_map: np.ndarray
    final_labels: np.ndarray
    n_final: int


def inverse_scores(scores) -> np.ndarray:
    S = np.asarray(scores.scores if isinstance(scores, ScoreMatrix) else scores, dtype=np.float64)
    with np.errstate(divide="ignore"):
        D = 1.0 / S
    D[S == np.inf] = 0.0
    D[S == 0] = np.inf
    return D


def build_dendrogram(scores) -> Dendrogram:
    """Single linkage (Kruskal order) on ``1 / scores``.

    Edges are processed by ``(distance, i, j)`` with ``i < j`` leaf ids, which
    fixes the merge order among equal heights.
    """
    D = inverse_scores(scores)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InvalidArgumentError("scores must be a square matrix")
    k = D.shape[0]
    if k < 1:
        raise InvalidArgumentError("need at least one cluster")
    if np.any(np.isnan(D)) or np.any(D < 0):
        raise InvalidArgumentError("scores must be nonnegative")
    if not np.array_equal(D, D.T):
        raise InvalidArgumentError("scores must be symmetric")

    i, j = np.triu_indices(k, 1)
    d = D[i, j]
    order = np.lexsort((j, i, d))

    parent = list(range(k))
    node = list(range(k))  # dendrogram node id of each union-find root

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    merges = []
    for e in order:
        ra, rb = find(int(i[e])), find(int(j[e]))
        if ra == rb:
            continue
        na, nb = node[ra], node[rb]
        merges.append((min(na, nb), max(na, nb), float(d[e])))
        parent[rb] = ra
        node[ra] = k + len(merges) - 1
        if len(merges) == k - 1:
            break
    return Dendrogram(tuple(merges), k)


def _apply(dendro: Dendrogram, n_steps: int, initial_labels) -> FinalClustering:
    k = dendro.leaf_count
    members = {leaf: [leaf] for leaf in range(k)}
    for s, (a, b, _) in enumerate(dendro.merges[:n_steps]):
        members[k + s] = members.pop(a) + members.pop(b)
    raw = np.empty(k, dtype=np.int64)
    for cid, leaves in enumerate(members.values()):
        raw[leaves] = cid
    cluster_map, _ = canonicalize_labels(raw)
    if initial_labels is None:
        final = cluster_map.copy()
    else:
        initial = np.asarray(initial_labels, dtype=np.int64)
        if initial.size and (initial.min() < 0 or initial.max() >= k):
            raise InvalidArgumentError("initial labels reference clusters outside the dendrogram")
        final = cluster_map[initial]
    return FinalClustering(cluster_map, final, int(cluster_map.max()) + 1)


def cut_by_count(dendro: Dendrogram, target: int, initial_labels=None) -> FinalClustering:
    """Partition into ``target`` clusters by undoing the last ``target - 1`` merges."""
    k = dendro.leaf_count
    if not 1 <= target <= k:
        raise InvalidArgumentError(f"target must satisfy 1 <= target <= {k}, got {target}")
    return _apply(dendro, k - int(target), initial_labels)


def cut_by_threshold(dendro: Dendrogram, score_threshold: float, initial_labels=None) -> FinalClustering:
    """Keep exactly the merges with height ``< 1 / score_threshold``.

    Equivalently, fuse every pair connected through scores above the threshold.
    """
    if not score_threshold > 0:
        raise InvalidArgumentError("score_threshold must be positive")
    limit = 1.0 / score_threshold
    n_steps = int(np.count_nonzero(dendro.heights < limit))
    return _apply(dendro, n_steps, initial_labels)
