"""Choosing the initial cluster count with the jump statistic.

For each K the distortion is ``d_K = wcss_K / (n p)``. It is transformed as
``d_K ** -Y`` with ``Y = p / 2``, and K is chosen where the transformed
distortion jumps the most: ``J_K = d_K**-Y - d_{K-1}**-Y`` with
``d_0**-Y = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import InvalidArgumentError
from .kmeans import KMeansModel, as_data_matrix, derive_seed, multi_start_fit

__all__ = ["JumpProfile", "default_k_max", "jump_select", "jumps_from_distortions"]


@dataclass
class JumpProfile:
    """Distortion curve and jump statistic over ``K = 1..len(distortions)``.

    ``distortions[i]`` and ``jumps[i]`` belong to ``K = i + 1``. The scan
    stops early at the first K whose distortion is exactly zero, so the arrays
    can be shorter than ``k_max``.
    """

    k_max: int
    distortions: np.ndarray
    jumps: np.ndarray
    selected_k: int
    power: float
    models: list[KMeansModel] = field(default_factory=list, repr=False)

    @property
    def selected_model(self) -> KMeansModel:
        return self.models[self.selected_k - 1]


def default_k_max(n: int) -> int:
    """``min(max(floor(sqrt(n)), 30), n)``."""
    if n < 1:
        raise InvalidArgumentError("n must be positive")
    return min(max(math.isqrt(int(n)), 30), int(n))


def jumps_from_distortions(distortions, power: float) -> np.ndarray:
    """Jump statistic from a distortion curve; a zero distortion gives ``inf``."""
    d = np.asarray(distortions, dtype=np.float64)
    with np.errstate(divide="ignore"):
        transformed = np.where(d > 0, d, 0.0) ** -power
    transformed = np.where(d > 0, transformed, np.inf)
    return np.diff(np.concatenate([[0.0], transformed]))


def jump_select(data, k_max: int | None = None, n_starts: int = 25, seed: int = 0, *,
                n_jobs: int | None = 1) -> JumpProfile:
    """Fit K-means for every ``K = 1..k_max`` and pick K by the jump statistic.

    The fit for K uses ``multi_start_fit(data, K, n_starts, derive_seed(seed, K))``.
    Ties in the jump statistic go to the smallest K.
    """
    X = as_data_matrix(data)
    n, p = X.shape
    if k_max is None:
        k_max = default_k_max(n)
    if k_max < 1 or k_max > n:
        raise InvalidArgumentError(f"k_max must satisfy 1 <= k_max <= n={n}, got {k_max}")
    power = p / 2.0

    models: list[KMeansModel] = []
    distortions = []
    for k in range(1, k_max + 1):
        model = multi_start_fit(X, k, n_starts, derive_seed(seed, k), n_jobs=n_jobs)
        models.append(model)
        distortions.append(model.wcss / (n * p))
        if model.wcss == 0.0:
            break

    distortions = np.asarray(distortions)
    jumps = jumps_from_distortions(distortions, power)
    # np.argmax returns the first maximum, i.e. the smallest K on ties.
    selected = int(np.argmax(jumps)) + 1
    return JumpProfile(
        k_max=int(k_max),
        distortions=distortions,
        jumps=jumps,
        selected_k=selected,
        power=power,
        models=models,
    )
