"""Gray-level co-occurrence matrices and the five derived texture features.

A co-occurrence matrix is accumulated symmetrically: each ordered pixel
pair at the configured displacement adds a count to both (i, j) and
(j, i), and the matrix is normalized to sum to one. Features are computed
at the four standard orientations (0, 45, 90 and 135 degrees) and either
averaged per feature or concatenated angle-major.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NoValidPairsError
from .imaging import QuantizedImage

ANGLES = (0, 45, 90, 135)
FEATURE_NAMES = ("contrast", "correlation", "energy", "homogeneity", "entropy")
AGGREGATIONS = ("average", "concatenate")

# (dx, dy) per angle at distance 1; dy is positive downward, so the
# 45/90/135 offsets point toward the upper image rows.
_UNIT_OFFSETS = {0: (1, 0), 45: (1, -1), 90: (0, -1), 135: (-1, -1)}

_SIGMA2_FLOOR = 1e-12


@dataclass(frozen=True)
class GlcmOffset:
    """Pixel displacement: a distance and one of the four orientations."""

    distance: int = 1
    angle: int = 0

    def __post_init__(self):
        if self.distance < 1:
            raise ValueError(f"distance must be >= 1, got {self.distance}")
        if self.angle not in _UNIT_OFFSETS:
            raise ValueError(f"angle must be one of {ANGLES}, got {self.angle}")

    @property
    def shift(self) -> tuple[int, int]:
        dx, dy = _UNIT_OFFSETS[self.angle]
        return dx * self.distance, dy * self.distance


@dataclass(frozen=True, eq=False)
class GlcmMatrix:
    """Normalized symmetric co-occurrence probabilities with marginals.

    ``p`` sums to one and is symmetric by construction; ``mu`` and
    ``sigma2`` are the mean and variance of the (identical) row and
    column marginals.
    """

    levels: int
    p: np.ndarray
    mu: float
    sigma2: float


@dataclass(frozen=True)
class GlcmFeatures:
    contrast: float
    correlation: float
    energy: float
    homogeneity: float
    entropy: float

    def as_array(self) -> np.ndarray:
        """Values in the frozen serialization order of FEATURE_NAMES."""
        return np.array(
            [self.contrast, self.correlation, self.energy, self.homogeneity, self.entropy]
        )


def compute_glcm(img: QuantizedImage, offset: GlcmOffset = GlcmOffset()) -> GlcmMatrix:
    """Accumulate the symmetric normalized GLCM for one displacement.

    Raises NoValidPairsError when the image holds no pixel pair at the
    offset (it is smaller than the displacement in some direction).
    """
    dx, dy = offset.shift
    pixels = np.ascontiguousarray(img.pixels, dtype=np.uint8)
    counts = _kernels.glcm_counts(pixels, img.levels, dx, dy)
    total = int(counts.sum())
    if total == 0:
        raise NoValidPairsError(
            f"no pixel pairs at offset ({dx}, {dy}) in a "
            f"{img.width}x{img.height} image"
        )
    p = counts / float(total)
    marginal = p.sum(axis=1)
    idx = np.arange(img.levels, dtype=np.float64)
    mu = float(np.dot(idx, marginal))
    sigma2 = float(np.dot((idx - mu) ** 2, marginal))
    return GlcmMatrix(levels=img.levels, p=p, mu=mu, sigma2=sigma2)


def _index_diff_sq(levels: int) -> np.ndarray:
    idx = np.arange(levels, dtype=np.float64)
    d = idx[:, None] - idx[None, :]
    return d * d


def contrast(m: GlcmMatrix) -> float:
    """Sum of P_ij (i - j)^2."""
    return float(np.sum(m.p * _index_diff_sq(m.levels)))


def correlation(m: GlcmMatrix) -> float:
    """Sum of P_ij (i - mu)(j - mu) / sigma^2, in [-1, 1].

    A constant image has zero marginal variance; that degenerate case
    is defined to be perfectly correlated and returns 1.0.
    """
    if m.sigma2 < _SIGMA2_FLOOR:
        return 1.0
    dev = np.arange(m.levels, dtype=np.float64) - m.mu
    return float(np.sum(m.p * np.outer(dev, dev)) / m.sigma2)


def energy(m: GlcmMatrix) -> float:
    """Sum of squared cell probabilities, in (0, 1]."""
    return float(np.sum(m.p * m.p))


def homogeneity(m: GlcmMatrix) -> float:
    """Sum of P_ij / (1 + (i - j)^2), in (0, 1]."""
    return float(np.sum(m.p / (1.0 + _index_diff_sq(m.levels))))


def glcm_entropy(m: GlcmMatrix) -> float:
    """Sum of -ln(P_ij) P_ij in nats, with 0 ln 0 taken as 0."""
    nz = m.p[m.p > 0.0]
    return float(np.sum(-np.log(nz) * nz))


def glcm_features(m: GlcmMatrix) -> GlcmFeatures:
    return GlcmFeatures(
        contrast=contrast(m),
        correlation=correlation(m),
        energy=energy(m),
        homogeneity=homogeneity(m),
        entropy=glcm_entropy(m),
    )


def glcm_feature_block(
    img: QuantizedImage, distance: int = 1, aggregation: str = "average"
) -> np.ndarray:
    """The GLCM part of a feature vector, over all four orientations.

    ``average`` returns the per-feature mean across angles (length 5);
    ``concatenate`` returns the angle-major layout 0/45/90/135 with the
    five features in FEATURE_NAMES order inside each angle (length 20).
    """
    if aggregation not in AGGREGATIONS:
        raise ValueError(f"aggregation must be one of {AGGREGATIONS}, got {aggregation!r}")
    per_angle = np.stack(
        [
            glcm_features(compute_glcm(img, GlcmOffset(distance, angle))).as_array()
            for angle in ANGLES
        ]
    )
    if aggregation == "average":
        return per_angle.mean(axis=0)
    return per_angle.ravel()


def block_length(aggregation: str) -> int:
    if aggregation not in AGGREGATIONS:
        raise ValueError(f"aggregation must be one of {AGGREGATIONS}, got {aggregation!r}")
    return 5 if aggregation == "average" else 20
