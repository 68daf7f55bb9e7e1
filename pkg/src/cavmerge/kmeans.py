"""Lloyd's K-means with Forgy initialisation and seeded multi-start.

The inner loop is compiled with numba (``nogil``) so independent starts can
run on a thread pool. All randomness flows through ``numpy.random`` generators
seeded from :func:`derive_seed`, which makes every fit a pure function of
``(data, k, seed)``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from ._errors import DataError, InvalidArgumentError

__all__ = [
    "KMeansModel",
    "as_data_matrix",
    "canonicalize_labels",
    "derive_seed",
    "lloyd_fit",
    "multi_start_fit",
]

_MASK64 = (1 << 64) - 1


def as_data_matrix(data) -> np.ndarray:
    """Validate and return ``data`` as a C-contiguous float64 ``(n, p)`` array."""
    X = np.ascontiguousarray(data, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DataError(f"data must be a non-empty n x p matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(X), axis=1))[0])
        raise DataError(f"data contains non-finite values (first at row {bad})")
    return X


def derive_seed(seed: int, index: int) -> int:
    """Deterministic 64-bit sub-seed for the ``index``-th child of ``seed``.

    Children are drawn from ``numpy.random.SeedSequence(seed, spawn_key=(index,))``,
    i.e. the same stream ``SeedSequence(seed).spawn(...)[index]`` would give.
    """
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def canonicalize_labels(labels) -> tuple[np.ndarray, np.ndarray]:
    """Renumber labels by order of first appearance.

    Returns the new label vector and ``order`` such that new id ``j``
    corresponds to old id ``order[j]``.
    """
    labels = np.asarray(labels)
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    remap = np.empty(int(labels.max()) + 1, dtype=np.int64)
    remap[order] = np.arange(order.size)
    return remap[labels], order


@dataclass
class KMeansModel:
    """Result of one K-means fit.

    Attributes
    ----------
    centers : ndarray, shape (k, p)
    labels : ndarray of int64, shape (n,)
        Cluster ids in ``0..k-1``, numbered by first appearance.
    cluster_sizes : ndarray of int64, shape (k,)
    wcss : float
        Total within-cluster sum of squared Euclidean distances.
    n_iter : int
    wcss_history : ndarray
        wcss after every center update, in iteration order.
    seed : int
        Seed the fit was started from.
    """

    centers: np.ndarray
    labels: np.ndarray
    cluster_sizes: np.ndarray
    wcss: float
    n_iter: int = 0
    wcss_history: np.ndarray = field(default_factory=lambda: np.empty(0))
    seed: int = 0

    @property
    def k(self) -> int:
        return int(self.centers.shape[0])


@nb.njit(cache=True, nogil=True)
def _scan(X, centers_t, i, buf):
    # Exact nearest and second-nearest center of point i by full scan.
    # centers_t is (p, k) so the inner loop runs contiguously over centers.
    p, k = centers_t.shape
    buf[:] = 0.0
    for d in range(p):
        x = X[i, d]
        for j in range(k):
            t = x - centers_t[d, j]
            buf[j] += t * t
    best = np.inf
    second = np.inf
    arg = 0
    for j in range(k):
        s = buf[j]
        if s < best:  # strict: ties keep the lowest index
            second = best
            best = s
            arg = j
        elif s < second:
            second = s
    return arg, best, second


@nb.njit(cache=True, nogil=True)
def _half_separation(centers, out):
    # Half the distance from each center to its nearest other center.
    k = centers.shape[0]
    out[:] = np.inf
    for a in range(k):
        for b in range(a + 1, k):
            s = 0.0
            for d in range(centers.shape[1]):
                t = centers[a, d] - centers[b, d]
                s += t * t
            s = 0.5 * np.sqrt(s)
            if s < out[a]:
                out[a] = s
            if s < out[b]:
                out[b] = s


@nb.njit(cache=True, nogil=True)
def _move(X, i, a, b, sizes, sums):
    sizes[a] -= 1
    sizes[b] += 1
    for d in range(X.shape[1]):
        sums[a, d] -= X[i, d]
        sums[b, d] += X[i, d]


@nb.njit(cache=True, nogil=True)
def _repair_empty(X, labels, sqd, sizes, sums, lower):
    # Move the point farthest from its center into each empty cluster.
    n = X.shape[0]
    for j in range(sizes.shape[0]):
        if sizes[j] > 0:
            continue
        far = -1
        far_d = -1.0
        for i in range(n):
            if sizes[labels[i]] > 1 and sqd[i] > far_d:
                far_d = sqd[i]
                far = i
        sums[j, :] = 0.0  # drop rounding residue left by departed points
        _move(X, far, labels[far], j, sizes, sums)
        labels[far] = j
        sqd[far] = 0.0
        lower[far] = 0.0


@nb.njit(cache=True, nogil=True)
def _own_sqdist(XT, centers, labels, out):
    # Squared distance of every point to its own center, dimension-major.
    p, n = XT.shape
    out[:] = 0.0
    for d in range(p):
        for i in range(n):
            t = XT[d, i] - centers[labels[i], d]
            out[i] += t * t


@nb.njit(cache=True, nogil=True)
def _refresh_sqdist(X, centers, labels, moved, out):
    # Recompute only where the own center changed; elsewhere the value is
    # already exact because the center is bitwise unchanged.
    p = X.shape[1]
    for i in range(X.shape[0]):
        a = labels[i]
        if moved[a]:
            s = 0.0
            for d in range(p):
                t = X[i, d] - centers[a, d]
                s += t * t
            out[i] = s


@nb.njit(cache=True, nogil=True)
def _lloyd(X, XT, init, max_iter, tol):
    """Lloyd iterations with Hamerly pruning.

    Each iteration first evaluates every point's exact distance to its own
    center (which gives the wcss of the previous update), then certifies the
    assignment with the half-separation / lower-bound test and fully scans only
    the uncertified points. Pruning never alters the assignment plain Lloyd
    would make. Center sums are maintained incrementally as points move.
    """
    n, p = X.shape
    k = init.shape[0]
    centers = init.copy()
    old = np.empty_like(centers)
    centers_t = np.empty((p, k))
    buf = np.empty(k)
    labels = np.empty(n, dtype=np.int64)
    lower = np.empty(n)
    sqd = np.empty(n)
    sizes = np.zeros(k, dtype=np.int64)
    sums = np.zeros((k, p))
    half_sep = np.empty(k)
    moved = np.empty(k, dtype=np.bool_)
    history = np.empty(max_iter)
    wcss = np.inf
    n_iter = 0

    centers_t[:, :] = centers.T
    for i in range(n):
        a, b, s = _scan(X, centers_t, i, buf)
        labels[i] = a
        sqd[i] = b
        lower[i] = np.sqrt(s)
        sizes[a] += 1
    for d in range(p):
        for i in range(n):
            sums[labels[i], d] += XT[d, i]

    while True:
        _repair_empty(X, labels, sqd, sizes, sums, lower)
        old[:, :] = centers
        for j in range(k):
            for d in range(p):
                centers[j, d] = sums[j, d] / sizes[j]
        n_iter += 1

        top = 0.0
        top_j = -1
        runner = 0.0
        n_moved = 0
        for j in range(k):
            s = 0.0
            for d in range(p):
                t = centers[j, d] - old[j, d]
                s += t * t
            moved[j] = s > 0.0
            n_moved += moved[j]
            mv = np.sqrt(s)
            if mv > top:
                runner = top
                top = mv
                top_j = j
            elif mv > runner:
                runner = mv

        if n_iter == 1 or 4 * n_moved > k:
            _own_sqdist(XT, centers, labels, sqd)
        else:
            _refresh_sqdist(X, centers, labels, moved, sqd)
        prev = wcss
        wcss = 0.0
        for i in range(n):
            wcss += sqd[i]
        history[n_iter - 1] = wcss
        if wcss == 0.0 or n_iter >= max_iter:
            break
        if np.isfinite(prev) and prev - wcss < tol * prev:
            break

        centers_t[:, :] = centers.T
        _half_separation(centers, half_sep)
        changed = False
        for i in range(n):
            a = labels[i]
            low = lower[i] - (runner if a == top_j else top)
            lower[i] = low
            m = half_sep[a] if half_sep[a] > low else low
            if sqd[i] < m * m * (1.0 - 1e-10):
                continue
            a2, b, s = _scan(X, centers_t, i, buf)
            sqd[i] = b
            lower[i] = np.sqrt(s)
            if a2 != a:
                changed = True
                _move(X, i, a, a2, sizes, sums)
                labels[i] = a2
        if not changed:
            break
    return labels, centers, sizes, wcss, history[:n_iter], n_iter


def _check_k(n: int, k: int):
    if not isinstance(k, (int, np.integer)) or k < 1 or k > n:
        raise InvalidArgumentError(f"k must satisfy 1 <= k <= n={n}, got {k}")


def _fit(X, XT, k, seed, max_iter, tol) -> KMeansModel:
    # Labels come back in raw Lloyd numbering; callers canonicalize the model they keep.
    rng = np.random.default_rng(int(seed) & _MASK64)
    init = X[rng.choice(X.shape[0], size=int(k), replace=False)]
    labels, centers, sizes, wcss, history, n_iter = _lloyd(X, XT, init, int(max_iter), float(tol))
    return KMeansModel(
        centers=centers,
        labels=labels,
        cluster_sizes=sizes,
        wcss=float(wcss),
        n_iter=int(n_iter),
        wcss_history=history.copy(),
        seed=int(seed),
    )


def _canonical(model: KMeansModel) -> KMeansModel:
    labels, order = canonicalize_labels(model.labels)
    model.labels = labels
    model.centers = model.centers[order]
    model.cluster_sizes = model.cluster_sizes[order]
    return model


def _check_iter(max_iter, tol):
    if max_iter < 1:
        raise InvalidArgumentError("max_iter must be positive")
    if tol < 0:
        raise InvalidArgumentError("tol must be nonnegative")


def lloyd_fit(data, k: int, seed: int = 0, max_iter: int = 300, tol: float = 1e-6) -> KMeansModel:
    """Single Lloyd run from ``k`` distinct data points chosen uniformly (Forgy).

    Iterates assignment and center update until labels stop changing, the
    relative wcss improvement falls below ``tol``, or ``max_iter``
    updates have run. Nearest-center ties go to the lowest cluster index;
    a cluster left empty is re-seeded with the point farthest from its
    current center. Labels are renumbered by first appearance.
    """
    X = as_data_matrix(data)
    _check_k(X.shape[0], k)
    _check_iter(max_iter, tol)
    return _canonical(_fit(X, np.ascontiguousarray(X.T), k, seed, max_iter, tol))


def multi_start_fit(data, k: int, n_starts: int = 25, seed: int = 0, *, max_iter: int = 300,
                    tol: float = 1e-6, n_jobs: int | None = 1) -> KMeansModel:
    """Best of ``n_starts`` Lloyd runs by wcss (ties go to the earliest start).

    Start ``i`` uses ``derive_seed(seed, i)``. With ``n_jobs > 1`` the starts
    run on a thread pool; the result does not depend on scheduling.
    """
    X = as_data_matrix(data)
    XT = np.ascontiguousarray(X.T)
    _check_k(X.shape[0], k)
    _check_iter(max_iter, tol)
    if n_starts < 1:
        raise InvalidArgumentError("n_starts must be positive")
    seeds = [derive_seed(seed, i) for i in range(n_starts)]

    def run(s):
        return _fit(X, XT, k, s, max_iter, tol)

    if n_jobs is not None and n_jobs > 1 and n_starts > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            models = list(pool.map(run, seeds))
    else:
        models = [run(s) for s in seeds]
    best = min(range(n_starts), key=lambda i: (models[i].wcss, i))
    return _canonical(models[best])
