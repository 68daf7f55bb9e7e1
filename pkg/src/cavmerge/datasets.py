"""Labelled datasets: CSV ingestion and seeded 2-D shape generators.

The generators give rough stand-ins for common benchmark shapes (spherical
blobs, a disk inside a ring, two interleaved moons). They are not copies of
any published benchmark file.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from ._errors import DataError, InvalidArgumentError

__all__ = [
    "LabeledDataset",
    "gen_bullseye",
    "gen_gaussian_blobs",
    "gen_two_moons",
    "load_csv",
    "save_csv",
    "spherical7_centers",
]


@dataclass
class LabeledDataset:
    """Data matrix with optional ground truth.

    ``true_labels`` is ``None`` for unlabelled input; otherwise it is densely
    numbered from 0 in order of first appearance.
    """

    data: np.ndarray
    true_labels: np.ndarray | None
    name: str = ""
    feature_names: list[str] | None = None

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    @property
    def p(self) -> int:
        return int(self.data.shape[1])


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _encode(values) -> np.ndarray:
    index: dict = {}
    return np.array([index.setdefault(v, len(index)) for v in values], dtype=np.int64)


def load_csv(path, label_column: int | str | None = -1, name: str | None = None) -> LabeledDataset:
    """Read a comma-separated file into a :class:`LabeledDataset`.

    Parameters
    ----------
    path : path-like
    label_column : int, str or None
        Column holding the ground truth, by position (negative counts from the
        end; default is the last column) or by header name. ``None`` reads
        every column as a feature.
    name : str, optional
        Dataset name; defaults to the file stem.

    Notes
    -----
    A first row is treated as a header when any of its feature fields is not
    a number. Label values are re-encoded densely in order of first
    appearance.
    """
    path = os.fspath(path)
    if not os.path.exists(path):
        raise DataError(f"{path}: no such file")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(f.strip() for f in r)]
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])

    header = None
    if isinstance(label_column, str):
        header = [f.strip() for f in rows[0]]
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not found in header")
        label_idx = header.index(label_column)
    elif label_column is None:
        label_idx = None
    else:
        label_idx = int(label_column) % width if -width <= int(label_column) < width else None
        if label_idx is None:
            raise DataError(f"{path}: label column {label_column} out of range for {width} columns")
    if header is None:
        first = [f.strip() for i, f in enumerate(rows[0]) if i != label_idx]
        if not all(_is_number(f) for f in first):
            header = [f.strip() for f in rows[0]]
    body = rows[1:] if header is not None else rows
    line0 = 2 if header is not None else 1
    if not body:
        raise DataError(f"{path}: no data rows")

    feat_idx = [i for i in range(width) if i != label_idx]
    if not feat_idx:
        raise DataError(f"{path}: no feature columns")
    X = np.empty((len(body), len(feat_idx)))
    labels = []
    for r, row in enumerate(body):
        line = line0 + r
        if len(row) != width:
            raise DataError(f"{path}: line {line} has {len(row)} fields, expected {width}")
        for c, i in enumerate(feat_idx):
            field = row[i].strip()
            try:
                X[r, c] = float(field)
            except ValueError:
                raise DataError(f"{path}: line {line}, column {i + 1}: not a number: {field!r}") from None
        if not np.all(np.isfinite(X[r])):
            raise DataError(f"{path}: line {line}: non-finite feature value")
        if label_idx is not None:
            labels.append(row[label_idx].strip())

    return LabeledDataset(
        data=X,
        true_labels=_encode(labels) if label_idx is not None else None,
        name=name if name is not None else os.path.splitext(os.path.basename(path))[0],
        feature_names=[header[i] for i in feat_idx] if header is not None else None,
    )


def save_csv(dataset: LabeledDataset, path) -> None:
    """Write features (17 significant digits) and, if present, a ``label`` column."""
    X = np.asarray(dataset.data, dtype=np.float64)
    names = dataset.feature_names or [f"x{i}" for i in range(X.shape[1])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        has_labels = dataset.true_labels is not None
        w.writerow(names + (["label"] if has_labels else []))
        for i, row in enumerate(X):
            fields = [format(v, ".17g") for v in row]
            if has_labels:
                fields.append(str(int(dataset.true_labels[i])))
            w.writerow(fields)


def spherical7_centers(separation: float = 10.0) -> np.ndarray:
    """Seven 2-D centers (origin plus a regular hexagon); every pair is at least ``separation`` apart."""
    angles = np.arange(6) * (np.pi / 3)
    ring = separation * np.column_stack([np.cos(angles), np.sin(angles)])
    return np.vstack([[0.0, 0.0], ring])


def gen_gaussian_blobs(n_per: int, centers, sigma: float = 1.0, seed: int = 0,
                       name: str = "blobs") -> LabeledDataset:
    """``n_per`` isotropic Gaussian samples around each center; label = center index."""
    C = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    if C.size == 0:
        raise InvalidArgumentError("need at least one center")
    if sigma <= 0 or n_per < 1:
        raise InvalidArgumentError("sigma and n_per must be positive")
    rng = np.random.default_rng(seed)
    X = np.repeat(C, n_per, axis=0) + sigma * rng.standard_normal((C.shape[0] * n_per, C.shape[1]))
    y = np.repeat(np.arange(C.shape[0]), n_per)
    return LabeledDataset(X, y, name)


def _annulus(rng, n, r_low, r_high):
    # radius by inverting the area CDF so points are uniform per unit area
    r = np.sqrt(rng.uniform(r_low ** 2, r_high ** 2, n))
    t = rng.uniform(0.0, 2 * np.pi, n)
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def gen_bullseye(n_inner: int = 1000, n_ring: int = 2000, r_inner: float = 1.0,
                 r_ring: tuple[float, float] = (2.5, 3.5), seed: int = 0,
                 name: str = "bullseye") -> LabeledDataset:
    """Uniform disk (label 0) inside a uniform annulus (label 1)."""
    low, high = r_ring
    if not 0 < r_inner < low < high:
        raise InvalidArgumentError("radii must satisfy 0 < r_inner < r_ring[0] < r_ring[1]")
    if n_inner < 1 or n_ring < 1:
        raise InvalidArgumentError("sample counts must be positive")
    rng = np.random.default_rng(seed)
    X = np.vstack([_annulus(rng, n_inner, 0.0, r_inner), _annulus(rng, n_ring, low, high)])
    y = np.concatenate([np.zeros(n_inner, np.int64), np.ones(n_ring, np.int64)])
    return LabeledDataset(X, y, name)


def gen_two_moons(n_per: int = 500, noise_sigma: float = 0.1, seed: int = 0,
                  name: str = "moons") -> LabeledDataset:
    """Two interleaved half circles of unit radius with Gaussian jitter.

    Label 0 is the upper arc through ``(cos t, sin t)``; label 1 is the lower
    arc ``(1 - cos t, 0.5 - sin t)``, for ``t`` uniform on ``[0, pi]``.
    """
    if n_per < 1:
        raise InvalidArgumentError("n_per must be positive")
    if noise_sigma < 0:
        raise InvalidArgumentError("noise_sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    t0 = rng.uniform(0.0, np.pi, n_per)
    t1 = rng.uniform(0.0, np.pi, n_per)
    upper = np.column_stack([np.cos(t0), np.sin(t0)])
    lower = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    X = np.vstack([upper, lower])
    if noise_sigma > 0:
        X = X + noise_sigma * rng.standard_normal(X.shape)
    y = np.concatenate([np.zeros(n_per, np.int64), np.ones(n_per, np.int64)])
    return LabeledDataset(X, y, name)

