"""Pure-NumPy implementations of the per-pixel kernels.

This module is the reference: the compiled module ``_native`` must return
bit-identical arrays for every function here. The floating-point kernels
keep their expression trees deliberately simple (no fused operations, no
reassociation) so a scalar C loop evaluating the same expressions produces
the same IEEE-754 doubles. Treat the arithmetic order as a contract shared
with ``_native.pyx``.
"""

from __future__ import annotations

import numpy as np

# Bit i of an LBP code compares the neighbor at 45*i degrees counter-clockwise
# from East against the center; (dx, dy) with dy positive pointing down.
NEIGHBOR_OFFSETS = (
    (1, 0),    # E
    (1, -1),   # NE
    (0, -1),   # N
    (-1, -1),  # NW
    (-1, 0),   # W
    (-1, 1),   # SW
    (0, 1),    # S
    (1, 1),    # SE
)


def glcm_counts(pixels: np.ndarray, levels: int, dx: int, dy: int) -> np.ndarray:
    """Symmetric co-occurrence counts for the displacement (dx, dy).

    Every ordered pixel pair (p, p + offset) that lies fully inside the
    image adds one count to cell (i, j) and one to (j, i). Returns an
    int64 matrix of shape (levels, levels); all-zero when no pair fits.
    Callers must guarantee every pixel value is below ``levels``; the
    compiled backend indexes the count matrix unchecked.
    """
    h, w = pixels.shape
    x0, x1 = max(0, -dx), w - max(0, dx)
    y0, y1 = max(0, -dy), h - max(0, dy)
    if x1 <= x0 or y1 <= y0:
        return np.zeros((levels, levels), dtype=np.int64)
    a = pixels[y0:y1, x0:x1].astype(np.int64)
    b = pixels[y0 + dy:y1 + dy, x0 + dx:x1 + dx].astype(np.int64)
    counts = np.bincount((a * levels + b).ravel(), minlength=levels * levels)
    counts = counts.reshape(levels, levels)
    return counts + counts.T


def lbp_code_image(img: np.ndarray) -> np.ndarray:
    """8-neighbor LBP codes for all interior pixels of a uint8 image.

    A neighbor contributes its bit when it is >= the center. Returns a
    uint8 array of shape (h - 2, w - 2).
    """
    h, w = img.shape
    center = img[1:h - 1, 1:w - 1]
    codes = np.zeros((h - 2, w - 2), dtype=np.uint8)
    for bit, (dx, dy) in enumerate(NEIGHBOR_OFFSETS):
        neigh = img[1 + dy:h - 1 + dy, 1 + dx:w - 1 + dx]
        codes |= (neigh >= center).astype(np.uint8) << np.uint8(bit)
    return codes


def resize_bilinear(img: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Bilinear resize with center-aligned sampling and edge clamping."""
    h, w = img.shape
    sx = w / out_w
    sy = h / out_h
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * sx - 0.5
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * sy - 0.5
    x0f = np.floor(xs)
    y0f = np.floor(ys)
    fx = (xs - x0f)[None, :]
    fy = (ys - y0f)[:, None]
    x0 = np.clip(x0f.astype(np.int64), 0, w - 1)
    x1 = np.clip(x0f.astype(np.int64) + 1, 0, w - 1)
    y0 = np.clip(y0f.astype(np.int64), 0, h - 1)
    y1 = np.clip(y0f.astype(np.int64) + 1, 0, h - 1)
    v00 = img[y0[:, None], x0[None, :]].astype(np.float64)
    v01 = img[y0[:, None], x1[None, :]].astype(np.float64)
    v10 = img[y1[:, None], x0[None, :]].astype(np.float64)
    v11 = img[y1[:, None], x1[None, :]].astype(np.float64)
    top = (1.0 - fx) * v00 + fx * v01
    bot = (1.0 - fx) * v10 + fx * v11
    val = (1.0 - fy) * top + fy * bot
    return np.floor(val + 0.5).astype(np.uint8)


def rotate_bilinear(img: np.ndarray, cos_t: float, sin_t: float) -> np.ndarray:
    """Rotate about the image center by the angle given as (cos, sin).

    Inverse-mapped bilinear sampling on the original canvas; any of the
    four taps falling outside the frame contributes zero. The caller
    computes cos/sin once so both backends interpolate from identical
    scalars.
    """
    h, w = img.shape
    cx = (w - 1) / 2.0
    cy = (h - 1) / 2.0
    ddx = (np.arange(w, dtype=np.float64) - cx)[None, :]
    ddy = (np.arange(h, dtype=np.float64) - cy)[:, None]
    src_x = cos_t * ddx + sin_t * ddy + cx
    src_y = -sin_t * ddx + cos_t * ddy + cy
    x0f = np.floor(src_x)
    y0f = np.floor(src_y)
    fx = src_x - x0f
    fy = src_y - y0f
    x0 = x0f.astype(np.int64)
    y0 = y0f.astype(np.int64)

    def tap(yi, xi):
        inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        vals = img[np.clip(yi, 0, h - 1), np.clip(xi, 0, w - 1)].astype(np.float64)
        return np.where(inside, vals, 0.0)

    v00 = tap(y0, x0)
    v01 = tap(y0, x0 + 1)
    v10 = tap(y0 + 1, x0)
    v11 = tap(y0 + 1, x0 + 1)
    top = (1.0 - fx) * v00 + fx * v01
    bot = (1.0 - fx) * v10 + fx * v11
    val = (1.0 - fy) * top + fy * bot
    return np.floor(val + 0.5).astype(np.uint8)
