"""Log-concavity merging scores from point counts in three cylinders.

For an adjacent pair with centers ``mu1`` and ``mu2`` three congruent
cylinders share the axis through the centers. Each has radius ``r`` (the
largest distance of a member of either cluster to that axis) and axial
half-length ``||mu2 - mu1|| / 4``. They are centered at ``mu1``, at the
midpoint and at ``mu2``. With ``m1, m2, m3`` the numbers of observations
inside them, the score is ``m2**2 / (m1 * m3)``. If the underlying density is
log-concave along the pair, the score tends to exceed 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._errors import DegeneratePairError, InvalidArgumentError
from .adjacency import AdjacencySet
from .geometry import Segment, line_distance, projection_length
from .kmeans import KMeansModel, as_data_matrix

__all__ = [
    "CylinderCounts",
    "ScoreMatrix",
    "adjust_sparse_clusters",
    "pair_counts",
    "pair_score",
    "score_matrix",
]

SPARSE_CLUSTER_SIZE = 3


@dataclass(frozen=True)
class CylinderCounts:
    m1: int
    m2: int
    m3: int
    radius: float
    pair: tuple[int, int]

    @property
    def score(self) -> float:
        return pair_score(self.m1, self.m2, self.m3)


@dataclass
class ScoreMatrix:
    """Symmetric ``k x k`` merging scores.

    The diagonal is ``inf``; pairs that are not adjacent score exactly 0.
    ``counts`` keeps the cylinder counts of every scored pair, keyed by the
    sorted pair.
    """

    scores: np.ndarray
    k: int
    counts: dict = field(default_factory=dict, repr=False)

    def copy(self) -> "ScoreMatrix":
        return ScoreMatrix(self.scores.copy(), self.k, dict(self.counts))


def pair_score(m1: int, m2: int, m3: int) -> float:
    """``m2**2 / (m1 * m3)``, or 0 when either center cylinder is empty."""
    if m1 * m3 == 0:
        return 0.0
    return (m2 * m2) / (m1 * m3)


def pair_counts(data, model: KMeansModel, pair) -> CylinderCounts:
    """Cylinder counts for the ordered pair ``(k1, k2)``; counts run over all rows.

    Raises
    ------
    DegeneratePairError
        If the two centers coincide.
    """
    X = as_data_matrix(data)
    k1, k2 = (int(v) for v in pair)
    if k1 == k2:
        raise InvalidArgumentError("a pair needs two distinct clusters")
    labels = np.asarray(model.labels)
    mu1 = np.asarray(model.centers[k1], dtype=np.float64)
    mu2 = np.asarray(model.centers[k2], dtype=np.float64)
    if np.array_equal(mu1, mu2):
        raise DegeneratePairError(f"clusters {k1} and {k2} have coincident centers")
    members = (labels == k1) | (labels == k2)
    if not members.any():
        raise InvalidArgumentError(f"clusters {k1} and {k2} are both empty")

    axis = mu2 - mu1
    dist = line_distance(X, Segment(mu1, mu2))
    radius = float(dist[members].max())
    half = float(np.linalg.norm(axis / 4))
    lateral = dist < radius
    m = [
        int(np.count_nonzero(lateral & (projection_length(X - c, axis) < half)))
        for c in (mu1, (mu1 + mu2) / 2, mu2)
    ]
    return CylinderCounts(m[0], m[1], m[2], radius, (k1, k2))


def score_matrix(data, model: KMeansModel, adj: AdjacencySet) -> ScoreMatrix:
    """Scores for every adjacent pair; coincident centers score ``inf``."""
    X = as_data_matrix(data)
    k = model.k
    if adj.k != k:
        raise InvalidArgumentError("adjacency set and model disagree on the cluster count")
    S = np.zeros((k, k))
    np.fill_diagonal(S, np.inf)
    counts = {}
    for a, b in adj:
        try:
            c = pair_counts(X, model, (a, b))
        except DegeneratePairError:
            s = np.inf
        else:
            counts[(a, b)] = c
            s = c.score
        S[a, b] = S[b, a] = s
    return ScoreMatrix(S, k, counts)


def adjust_sparse_clusters(scores: ScoreMatrix, model: KMeansModel,
                           max_size: int = SPARSE_CLUSTER_SIZE) -> ScoreMatrix:
    """Link every cluster of at most ``max_size`` points to its nearest center.

    The link is an ``inf`` score in both directions. Nearest-center ties go to
    the lowest index. Returns a new matrix.
    """
    if scores.k != model.k:
        raise InvalidArgumentError("score matrix and model disagree on the cluster count")
    out = scores.copy()
    if model.k < 2:
        return out
    C = np.asarray(model.centers, dtype=np.float64)
    sizes = np.asarray(model.cluster_sizes)
    for k in np.flatnonzero(sizes <= max_size):
        d2 = np.sum((C - C[k]) ** 2, axis=1)
        d2[k] = np.inf
        nearest = int(np.argmin(d2))
        out.scores[k, nearest] = out.scores[nearest, k] = np.inf
    return out
