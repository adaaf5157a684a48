"""Image decoding and geometric preprocessing.

Grayscale images are plain 2-D ``numpy.uint8`` arrays of shape
``(height, width)``. PGM (P2/P5) and PPM (P3/P6) files are decoded by this
module byte-exactly; other raster formats are handed to Pillow when it is
installed. Color pixels are reduced with BT.601 luma.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    BadLevelCountError,
    CorruptFileError,
    UnsupportedFormatError,
    ZeroDimensionError,
)

_WHITESPACE = b" \t\n\r\x0b\x0c"
_DIGITS = b"0123456789"


@dataclass(frozen=True)
class QuantizedImage:
    """Gray-level indices in [0, levels) plus the level count they index."""

    levels: int
    pixels: np.ndarray

    def __post_init__(self):
        if not 2 <= self.levels <= 256:
            raise BadLevelCountError(f"levels must be in [2, 256], got {self.levels}")
        if self.pixels.size and int(self.pixels.max()) >= self.levels:
            raise ValueError("pixel level index exceeds levels - 1")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def _skip_space_and_comments(buf: bytes, i: int) -> int:
    n = len(buf)
    while i < n:
        c = buf[i:i + 1]
        if c in _WHITESPACE:
            i += 1
        elif c == b"#":
            while i < n and buf[i:i + 1] not in b"\r\n":
                i += 1
        else:
            break
    return i


def _read_header_ints(buf: bytes, i: int, count: int) -> tuple[list[int], int]:
    values = []
    n = len(buf)
    for _ in range(count):
        i = _skip_space_and_comments(buf, i)
        j = i
        while j < n and buf[j:j + 1] in _DIGITS:
            j += 1
        if j == i:
            raise CorruptFileError("expected an ASCII integer in netpbm header")
        values.append(int(buf[i:j]))
        i = j
    return values, i


def _decode_pnm(data: bytes) -> np.ndarray:
    """Decode P2/P3/P5/P6; returns (h, w) gray or (h, w, 3) RGB uint8."""
    magic = data[:2]
    ascii_form = magic in (b"P2", b"P3")
    color = magic in (b"P3", b"P6")
    channels = 3 if color else 1

    (width, height, maxval), i = _read_header_ints(data, 2, 3)
    if width < 1 or height < 1:
        raise CorruptFileError(f"invalid netpbm dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise UnsupportedFormatError(f"only 8-bit netpbm supported, maxval={maxval}")
    n_values = width * height * channels

    if ascii_form:
        values, i = _read_header_ints(data, i, n_values)
        i = _skip_space_and_comments(data, i)
        if i != len(data):
            raise CorruptFileError("trailing data after netpbm pixel values")
        arr = np.array(values, dtype=np.int64)
    else:
        if i >= len(data) or data[i:i + 1] not in _WHITESPACE:
            raise CorruptFileError("missing whitespace before binary netpbm payload")
        payload = data[i + 1:]
        if len(payload) != n_values:
            raise CorruptFileError(
                f"binary netpbm payload has {len(payload)} bytes, expected {n_values}"
            )
        arr = np.frombuffer(payload, dtype=np.uint8).astype(np.int64)

    if arr.size and int(arr.max()) > maxval:
        raise CorruptFileError("netpbm sample exceeds declared maxval")
    shape = (height, width, 3) if color else (height, width)
    return arr.reshape(shape).astype(np.uint8)


def decode_image(data: bytes) -> np.ndarray:
    """Decode an encoded raster file into a grayscale image.

    PGM and PPM are handled natively; anything else is tried through
    Pillow. RGB content is converted with :func:`to_grayscale`.
    """
    magic = data[:2]
    if magic in (b"P2", b"P5"):
        return _decode_pnm(data)
    if magic in (b"P3", b"P6"):
        return to_grayscale(_decode_pnm(data))
    return _decode_via_pillow(data)


def _decode_via_pillow(data: bytes) -> np.ndarray:
    try:
        from PIL import Image, UnidentifiedImageError
    except ImportError:
        raise UnsupportedFormatError(
            "not a netpbm file and Pillow is not installed"
        ) from None
    try:
        with Image.open(io.BytesIO(data)) as im:
            if im.mode == "L":
                return np.asarray(im, dtype=np.uint8)
            rgb = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise UnsupportedFormatError(str(exc)) from exc
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptFileError(str(exc)) from exc
    return to_grayscale(rgb)


def load_image(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def save_pgm(img: np.ndarray, path, binary: bool = True) -> None:
    """Write a grayscale image as PGM (binary P5 by default)."""
    img = np.ascontiguousarray(img, dtype=np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        if binary:
            fh.write(b"P5\n%d %d\n255\n" % (w, h))
            fh.write(img.tobytes())
        else:
            fh.write(b"P2\n%d %d\n255\n" % (w, h))
            lines = (" ".join(str(v) for v in row) for row in img.tolist())
            fh.write("\n".join(lines).encode("ascii") + b"\n")


def to_grayscale(rgb: np.ndarray) -> np.ndarray:
    """BT.601 luma: round(0.299 R + 0.587 G + 0.114 B) per pixel."""
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected an (h, w, 3) RGB array, got shape {rgb.shape}")
    r = rgb[:, :, 0].astype(np.float64)
    g = rgb[:, :, 1].astype(np.float64)
    b = rgb[:, :, 2].astype(np.float64)
    luma = 0.299 * r + 0.587 * g + 0.114 * b
    return np.floor(luma + 0.5).astype(np.uint8)


def resize(img: np.ndarray, out_w: int, out_h: int, method: str = "bilinear") -> np.ndarray:
    """Resize with center-aligned sampling; same-size output is the identity.

    ``method="nearest"`` snaps each sample to the closest source pixel,
    which keeps all arithmetic exact for tests; the default is bilinear.
    """
    if out_w < 1 or out_h < 1:
        raise ZeroDimensionError(f"target size {out_w}x{out_h} must be at least 1x1")
    img = np.ascontiguousarray(img, dtype=np.uint8)
    if method == "bilinear":
        return _kernels.resize_bilinear(img, out_w, out_h)
    if method == "nearest":
        h, w = img.shape
        xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (w / out_w) - 0.5
        ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (h / out_h) - 0.5
        xi = np.clip(np.floor(xs + 0.5).astype(np.int64), 0, w - 1)
        yi = np.clip(np.floor(ys + 0.5).astype(np.int64), 0, h - 1)
        return img[yi[:, None], xi[None, :]]
    raise ValueError(f"method must be bilinear or nearest, got {method!r}")


def rotate(img: np.ndarray, degrees: float, method: str = "bilinear") -> np.ndarray:
    """Rotate about the image center, keeping the canvas size.

    Out-of-frame samples read as black; corners that leave the frame are
    cropped. Rotation by 0 degrees returns the input bit-exactly.
    ``method="nearest"`` picks the closest source pixel instead of
    interpolating.
    """
    img = np.ascontiguousarray(img, dtype=np.uint8)
    rad = degrees * (math.pi / 180.0)
    cos_t, sin_t = math.cos(rad), math.sin(rad)
    if method == "bilinear":
        return _kernels.rotate_bilinear(img, cos_t, sin_t)
    if method == "nearest":
        h, w = img.shape
        cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
        ddx = (np.arange(w, dtype=np.float64) - cx)[None, :]
        ddy = (np.arange(h, dtype=np.float64) - cy)[:, None]
        xi = np.floor(cos_t * ddx + sin_t * ddy + cx + 0.5).astype(np.int64)
        yi = np.floor(-sin_t * ddx + cos_t * ddy + cy + 0.5).astype(np.int64)
        inside = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        out = img[np.clip(yi, 0, h - 1), np.clip(xi, 0, w - 1)]
        return np.where(inside, out, np.uint8(0))
    raise ValueError(f"method must be bilinear or nearest, got {method!r}")


def quantize(img: np.ndarray, levels: int) -> QuantizedImage:
    """Map 8-bit intensities onto ``levels`` gray bins.

    level = floor(intensity * levels / 256); monotone in the intensity,
    and the identity mapping when levels is 256.
    """
    if not 2 <= levels <= 256:
        raise BadLevelCountError(f"levels must be in [2, 256], got {levels}")
    pixels = (img.astype(np.int64) * levels) // 256
    return QuantizedImage(levels, pixels.astype(np.uint8))
