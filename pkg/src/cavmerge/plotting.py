"""Dependency-free SVG scatter plots of 2-D clusterings."""

from __future__ import annotations

import os

import numpy as np

from ._errors import InvalidArgumentError
from .datasets import LabeledDataset

__all__ = ["PALETTE", "plot_svg", "render_svg"]

# 20 categorical colors, cycled by label
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5",
    "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
)

CANVAS = 800
MARGIN = 0.05 * CANVAS
RADIUS = 2.5


def render_svg(data, labels, dims=None) -> str:
    """SVG document text for a scatter of ``data`` colored by ``labels``.

    Parameters
    ----------
    data : LabeledDataset or array_like, shape (n, p)
    labels : array_like of int, shape (n,)
    dims : pair of int, optional
        Columns to plot. Required when ``p != 2``.
    """
    X = np.asarray(data.data if isinstance(data, LabeledDataset) else data, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidArgumentError("data must be a 2-d array")
    if dims is None:
        if X.shape[1] != 2:
            raise InvalidArgumentError(
                f"can only plot 2-D data, got p={X.shape[1]}; choose two coordinates (e.g. --plot-dims 0,1)"
            )
        dims = (0, 1)
    a, b = (int(d) for d in dims)
    if not (0 <= a < X.shape[1] and 0 <= b < X.shape[1]):
        raise InvalidArgumentError(f"plot dims {dims} out of range for p={X.shape[1]}")
    y = np.asarray(labels, dtype=np.int64).ravel()
    if y.size != X.shape[0]:
        raise InvalidArgumentError("labels and data differ in length")
    if X.shape[0] == 0:
        raise InvalidArgumentError("nothing to plot")

    P = X[:, [a, b]]
    lo = P.min(axis=0)
    span = P.max(axis=0) - lo
    span[span == 0] = 1.0
    # equal scaling on both axes, centered inside the margins
    inner = CANVAS - 2 * MARGIN
    scale = inner / span.max()
    offset = MARGIN + (inner - span * scale) / 2
    sx = offset[0] + (P[:, 0] - lo[0]) * scale
    sy = CANVAS - (offset[1] + (P[:, 1] - lo[1]) * scale)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
        f'viewBox="0 0 {CANVAS} {CANVAS}">',
        f'<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="#ffffff"/>',
    ]
    for px, py, lab in zip(sx, sy, y):
        out.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{RADIUS}" fill="{PALETTE[lab % len(PALETTE)]}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_svg(data, labels, path, dims=None) -> None:
    """Write :func:`render_svg` output to ``path``; nothing is written on error."""
    text = render_svg(data, labels, dims)
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
