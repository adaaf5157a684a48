# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the per-pixel kernels.

``fallback.py`` is the reference implementation; every function here must
return bit-identical arrays. Floating-point expressions are written in the
same order as the NumPy code so that both backends produce the same
IEEE-754 doubles (the default build does not fuse multiply-adds).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


def glcm_counts(cnp.uint8_t[:, ::1] pixels, int levels, int dx, int dy):
    cdef Py_ssize_t h = pixels.shape[0]
    cdef Py_ssize_t w = pixels.shape[1]
    cdef Py_ssize_t x0 = max(0, -dx)
    cdef Py_ssize_t x1 = w - max(0, dx)
    cdef Py_ssize_t y0 = max(0, -dy)
    cdef Py_ssize_t y1 = h - max(0, dy)
    out = np.zeros((levels, levels), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] counts = out
    cdef Py_ssize_t x, y
    cdef int i, j
    for y in range(y0, y1):
        for x in range(x0, x1):
            i = pixels[y, x]
            j = pixels[y + dy, x + dx]
            counts[i, j] += 1
            counts[j, i] += 1
    return out


def lbp_code_image(cnp.uint8_t[:, ::1] img):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    out = np.zeros((h - 2, w - 2), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] codes = out
    cdef Py_ssize_t x, y
    cdef int code
    cdef cnp.uint8_t center
    # neighbor order: E, NE, N, NW, W, SW, S, SE; branchless comparisons
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            center = img[y, x]
            code = (img[y, x + 1] >= center)
            code |= (img[y - 1, x + 1] >= center) << 1
            code |= (img[y - 1, x] >= center) << 2
            code |= (img[y - 1, x - 1] >= center) << 3
            code |= (img[y, x - 1] >= center) << 4
            code |= (img[y + 1, x - 1] >= center) << 5
            code |= (img[y + 1, x] >= center) << 6
            code |= (img[y + 1, x + 1] >= center) << 7
            codes[y - 1, x - 1] = <cnp.uint8_t>code
    return out


def resize_bilinear(cnp.uint8_t[:, ::1] img, int out_w, int out_h):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef double sx = w / <double>out_w
    cdef double sy = h / <double>out_h
    out = np.empty((out_h, out_w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] dst = out
    cdef Py_ssize_t x, y
    cdef double xs, ys, x0f, y0f, fx, fy, v00, v01, v10, v11, top, bot, val
    cdef Py_ssize_t x0, x1, y0, y1
    for y in range(out_h):
        ys = (y + 0.5) * sy - 0.5
        y0f = floor(ys)
        fy = ys - y0f
        y0 = <Py_ssize_t>y0f
        if y0 < 0:
            y0 = 0
        elif y0 > h - 1:
            y0 = h - 1
        y1 = <Py_ssize_t>y0f + 1
        if y1 < 0:
            y1 = 0
        elif y1 > h - 1:
            y1 = h - 1
        for x in range(out_w):
            xs = (x + 0.5) * sx - 0.5
            x0f = floor(xs)
            fx = xs - x0f
            x0 = <Py_ssize_t>x0f
            if x0 < 0:
                x0 = 0
            elif x0 > w - 1:
                x0 = w - 1
            x1 = <Py_ssize_t>x0f + 1
            if x1 < 0:
                x1 = 0
            elif x1 > w - 1:
                x1 = w - 1
            v00 = img[y0, x0]
            v01 = img[y0, x1]
            v10 = img[y1, x0]
            v11 = img[y1, x1]
            top = (1.0 - fx) * v00 + fx * v01
            bot = (1.0 - fx) * v10 + fx * v11
            val = (1.0 - fy) * top + fy * bot
            dst[y, x] = <cnp.uint8_t>floor(val + 0.5)
    return out


def rotate_bilinear(cnp.uint8_t[:, ::1] img, double cos_t, double sin_t):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef double cx = (w - 1) / 2.0
    cdef double cy = (h - 1) / 2.0
    out = np.empty((h, w), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] dst = out
    cdef Py_ssize_t x, y, x0, y0
    cdef double ddx, ddy, src_x, src_y, x0f, y0f, fx, fy
    cdef double v00, v01, v10, v11, top, bot, val
    for y in range(h):
        ddy = y - cy
        for x in range(w):
            ddx = x - cx
            src_x = cos_t * ddx + sin_t * ddy + cx
            src_y = -sin_t * ddx + cos_t * ddy + cy
            x0f = floor(src_x)
            y0f = floor(src_y)
            fx = src_x - x0f
            fy = src_y - y0f
            x0 = <Py_ssize_t>x0f
            y0 = <Py_ssize_t>y0f
            v00 = img[y0, x0] if 0 <= x0 < w and 0 <= y0 < h else 0.0
            v01 = img[y0, x0 + 1] if 0 <= x0 + 1 < w and 0 <= y0 < h else 0.0
            v10 = img[y0 + 1, x0] if 0 <= x0 < w and 0 <= y0 + 1 < h else 0.0
            v11 = img[y0 + 1, x0 + 1] if 0 <= x0 + 1 < w and 0 <= y0 + 1 < h else 0.0
            top = (1.0 - fx) * v00 + fx * v01
            bot = (1.0 - fx) * v10 + fx * v11
            val = (1.0 - fy) * top + fy * bot
            dst[y, x] = <cnp.uint8_t>floor(val + 0.5)
    return out
