"""Adjacent cluster pairs from each observation's two nearest centers.

Two clusters are declared adjacent when some observation has their centers as
its nearest and second-nearest. Every such pair shares a nontrivial decision
boundary, so the result never contains a non-adjacent pair; adjacent pairs
with no observation near their common boundary may be missed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._errors import InvalidArgumentError
from .kmeans import KMeansModel, as_data_matrix

__all__ = ["AdjacencySet", "find_adjacent_pairs", "two_nearest_centers"]


@dataclass(frozen=True)
class AdjacencySet:
    """Unordered adjacent pairs, stored as sorted ``(low, high)`` tuples."""

    pairs: frozenset
    k: int

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        a, b = pair
        return (min(a, b), max(a, b)) in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs))

    def as_array(self) -> np.ndarray:
        """Pairs as an ``(m, 2)`` int array in lexicographic order."""
        return np.array(sorted(self.pairs), dtype=np.int64).reshape(-1, 2)


def two_nearest_centers(data, centers) -> np.ndarray:
    """Indices of the nearest and second-nearest center of every row of ``data``.

    Exact distance ties are resolved toward the lower center index.
    """
    X = np.asarray(data, dtype=np.float64)
    C = np.asarray(centers, dtype=np.float64)
    out = np.empty((X.shape[0], 2), dtype=np.int64)
    chunk = max(1, 2_000_000 // max(1, C.shape[0] * C.shape[1]))
    for start in range(0, X.shape[0], chunk):
        block = X[start:start + chunk]
        diff = block[:, None, :] - C[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        # stable sort keeps index order among equal distances
        out[start:start + chunk] = np.argsort(d2, axis=1, kind="stable")[:, :2]
    return out


def find_adjacent_pairs(data, model: KMeansModel) -> AdjacencySet:
    """Union over observations of their two-nearest-center pairs. Costs O(nK)."""
    X = as_data_matrix(data)
    centers = np.asarray(model.centers, dtype=np.float64)
    k = centers.shape[0]
    if k < 2:
        raise InvalidArgumentError("need at least two clusters to find adjacent pairs")
    if centers.shape[1] != X.shape[1]:
        raise InvalidArgumentError(
            f"dimension mismatch: data has p={X.shape[1]}, centers have p={centers.shape[1]}"
        )
    nearest = np.sort(two_nearest_centers(X, centers), axis=1)
    codes = np.unique(nearest[:, 0] * k + nearest[:, 1])
    pairs = frozenset((int(c // k), int(c % k)) for c in codes)
    return AdjacencySet(pairs=pairs, k=k)
