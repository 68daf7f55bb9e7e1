"""Adjusted Rand Index and trial summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._errors import InvalidArgumentError

__all__ = ["ContingencyTable", "adjusted_rand_index", "contingency_table", "mean_and_stderr"]


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    n: int


def contingency_table(a, b) -> ContingencyTable:
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size:
        raise InvalidArgumentError(f"label vectors differ in length ({a.size} vs {b.size})")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    counts = np.zeros((ai.max(initial=-1) + 1, bi.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(counts, (ai, bi), 1)
    return ContingencyTable(counts, counts.sum(axis=1), counts.sum(axis=0), int(a.size))


def _pairs(x) -> int:
    x = np.asarray(x, dtype=object)
    return int(sum(v * (v - 1) // 2 for v in x.ravel()))


def adjusted_rand_index(a, b) -> float:
    """Hubert-Arabie adjusted Rand index between two labelings.

    When the usual denominator vanishes (both labelings put everything in one
    cluster, or both are all singletons) the value is 1.0 if the partitions
    agree and 0.0 otherwise.
    """
    table = contingency_table(a, b)
    if table.n < 2:
        raise InvalidArgumentError("need at least two observations")
    # exact integer arithmetic up to the final division
    index = _pairs(table.counts)
    sum_a = _pairs(table.row_sums)
    sum_b = _pairs(table.col_sums)
    total = table.n * (table.n - 1) // 2
    num = index * total - sum_a * sum_b
    den = (sum_a + sum_b) * total - 2 * sum_a * sum_b
    if den == 0:
        same = table.counts.shape[0] == table.counts.shape[1] == np.count_nonzero(table.counts)
        return 1.0 if same else 0.0
    return 2 * num / den


def mean_and_stderr(values) -> tuple[float, float]:
    """Mean and sample standard deviation (``n - 1`` denominator; 0 for one value)."""
    v = [float(x) for x in values]
    if not v:
        raise InvalidArgumentError("need at least one value")
    mean = math.fsum(v) / len(v)
    if len(v) == 1:
        return mean, 0.0
    return mean, math.sqrt(math.fsum((x - mean) ** 2 for x in v) / (len(v) - 1))
