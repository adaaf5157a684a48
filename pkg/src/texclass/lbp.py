"""Local binary patterns: 8-neighbor codes and rotation-invariant histograms.

The code of a pixel sets bit i when the neighbor at 45*i degrees
counter-clockwise from East is greater than or equal to the center
(so a tie contributes the bit). Rotation invariance canonicalizes a code
to the minimum over its eight cyclic bit rotations; exactly 36 canonical
classes exist. Codes are computed on raw 8-bit intensities, never on
quantized levels, and border pixels are skipped rather than padded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import NEIGHBOR_OFFSETS
from .errors import ImageTooSmallError

MODES = ("raw", "rotation_invariant")


def _rotations(code: int):
    for r in range(8):
        yield ((code << r) | (code >> (8 - r))) & 0xFF


_RI_TABLE = np.array([min(_rotations(c)) for c in range(256)], dtype=np.uint8)

# canonical codes in ascending order define the rotation-invariant bins
RI_CLASSES = tuple(int(c) for c in sorted(set(int(v) for v in _RI_TABLE)))
_RI_BIN = np.empty(256, dtype=np.int64)
for _code in range(256):
    _RI_BIN[_code] = RI_CLASSES.index(int(_RI_TABLE[_code]))


@dataclass(frozen=True)
class LbpConfig:
    mode: str = "rotation_invariant"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def bins(self) -> int:
        return 256 if self.mode == "raw" else len(RI_CLASSES)


@dataclass(frozen=True, eq=False)
class LbpHistogram:
    mode: str
    bins: np.ndarray


def lbp_code(center: int, neighbors) -> int:
    """Code of one pixel from its center value and 8 ordered neighbors."""
    if len(neighbors) != 8:
        raise ValueError(f"expected 8 neighbor values, got {len(neighbors)}")
    center = int(center)  # uint8 scalars would wrap on subtraction
    code = 0
    for i, value in enumerate(neighbors):
        if int(value) - center >= 0:
            code |= 1 << i
    return code


def ri_map(code: int) -> int:
    """Canonical (minimal cyclic rotation) form of an 8-bit code."""
    if not 0 <= code <= 255:
        raise ValueError(f"code must be in [0, 255], got {code}")
    return int(_RI_TABLE[code])


def lbp_histogram(img: np.ndarray, cfg: LbpConfig = LbpConfig()) -> LbpHistogram:
    """Normalized histogram of LBP codes over all interior pixels."""
    h, w = img.shape
    if h < 3 or w < 3:
        raise ImageTooSmallError(f"need at least 3x3 pixels for LBP, got {w}x{h}")
    img = np.ascontiguousarray(img, dtype=np.uint8)
    codes = _kernels.lbp_code_image(img)
    counts = np.bincount(codes.ravel(), minlength=256)
    if cfg.mode == "rotation_invariant":
        binned = np.zeros(len(RI_CLASSES), dtype=np.int64)
        np.add.at(binned, _RI_BIN, counts)
        counts = binned
    return LbpHistogram(mode=cfg.mode, bins=counts / float(codes.size))


def histogram_length(mode: str) -> int:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return 256 if mode == "raw" else len(RI_CLASSES)
