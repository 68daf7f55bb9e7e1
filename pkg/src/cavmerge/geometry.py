"""Euclidean primitives: projection lengths, distances to a line, cylinder tests.

Every function accepts either a single point of shape ``(p,)`` or a stack of
points of shape ``(n, p)`` for ``x`` and returns a float or an ``(n,)`` array
accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._errors import InvalidArgumentError

__all__ = [
    "Segment",
    "projection_length",
    "line_distance",
    "cylinder_membership",
]


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidArgumentError(f"{name} must be a non-empty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} has non-finite entries")
    return arr


def _as_points(x, p: int) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim not in (1, 2) or arr.shape[-1] != p:
        raise InvalidArgumentError(f"dimension mismatch: expected trailing size {p}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Segment:
    """The infinite line through two distinct points ``a`` and ``b``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _as_vector(self.a, "a")
        b = _as_vector(self.b, "b")
        if a.shape != b.shape:
            raise InvalidArgumentError("segment endpoints differ in dimension")
        if np.array_equal(a, b):
            raise InvalidArgumentError("degenerate segment: a == b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def direction(self) -> np.ndarray:
        return self.b - self.a


def projection_length(x, y):
    """Length of the projection of ``x`` onto ``y``: ``|x . y| / ||y||``."""
    y = _as_vector(y, "y")
    norm = math.hypot(*y)  # rescales internally, so tiny vectors do not underflow to 0
    if norm == 0.0:
        raise InvalidArgumentError("cannot project onto the zero vector")
    x = _as_points(x, y.size)
    out = np.abs(x @ y) / norm
    return float(out) if out.ndim == 0 else out


def line_distance(x, seg: Segment):
    """Perpendicular distance from ``x`` to the line through ``seg.a`` and ``seg.b``.

    The radicand ``||x - a||^2 - ((x - a) . (b - a))^2 / ||b - a||^2`` is
    clamped at zero before the square root, so points numerically on the line
    get distance 0 rather than NaN.
    """
    if not isinstance(seg, Segment):
        raise InvalidArgumentError("seg must be a Segment")
    d = seg.direction
    x = _as_points(x, d.size)
    diff = x - seg.a
    along = (diff @ d) / math.hypot(*d)
    radicand = np.einsum("...i,...i->...", diff, diff) - along * along
    out = np.sqrt(np.maximum(radicand, 0.0))
    return float(out) if out.ndim == 0 else out


def cylinder_membership(x, axis_center, axis_dir, half_length: float, radius: float,
                        seg: Segment | None = None):
    """Strict membership in a finite hyper-cylinder.

    A point is inside when its distance to the axis line is ``< radius`` and
    the projection of ``x - axis_center`` on ``axis_dir`` is ``< half_length``.
    Points on either boundary are outside.

    Parameters
    ----------
    x : array_like, shape (p,) or (n, p)
    axis_center : array_like, shape (p,)
    axis_dir : array_like, shape (p,)
        Nonzero direction of the axis.
    half_length, radius : float
        Nonnegative axial half-length and lateral radius.
    seg : Segment, optional
        Line used for the lateral distance. Defaults to the line through
        ``axis_center`` along ``axis_dir``.

    Returns
    -------
    bool or ndarray of bool
    """
    if half_length < 0 or radius < 0:
        raise InvalidArgumentError("half_length and radius must be nonnegative")
    center = _as_vector(axis_center, "axis_center")
    direction = _as_vector(axis_dir, "axis_dir")
    if seg is None:
        seg = Segment(center, center + direction)
    x = _as_points(x, center.size)
    inside = (np.asarray(line_distance(x, seg)) < radius) & (
        np.asarray(projection_length(x - center, direction)) < half_length
    )
    return bool(inside) if inside.ndim == 0 else inside
