"""Feature vector assembly, z-score standardization and CSV persistence.

Three vector layouts exist: the GLCM block alone, the LBP histogram
alone, or both concatenated with the GLCM block first. Block lengths are
a pure function of the extraction configuration, and every valid
(variant, aggregation, lbp mode) combination yields a distinct total
length, so a stored CSV identifies its own layout.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from . import glcm, lbp
from .errors import (
    DimensionMismatchError,
    EmptyTrainingSetError,
    MixedLengthsError,
    SchemaMismatchError,
)
from .imaging import quantize, resize

VARIANTS = ("glcm", "lbp", "combined")

STDDEV_FLOOR = 1e-12


@dataclass(frozen=True)
class ExtractionConfig:
    """Knobs shared by every extraction: working size and block options."""

    resize: int = 128
    levels: int = 8
    distance: int = 1
    aggregation: str = "average"
    lbp_mode: str = "rotation_invariant"


@dataclass(eq=False)
class FeatureVector:
    values: np.ndarray
    label: str = ""
    source: str = ""
    variant: str | None = None


def vector_length(variant: str, cfg: ExtractionConfig = ExtractionConfig()) -> int:
    if variant == "glcm":
        return glcm.block_length(cfg.aggregation)
    if variant == "lbp":
        return lbp.histogram_length(cfg.lbp_mode)
    if variant == "combined":
        return glcm.block_length(cfg.aggregation) + lbp.histogram_length(cfg.lbp_mode)
    raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _layout_table() -> dict[int, tuple[str, str, str]]:
    table = {}
    for agg in glcm.AGGREGATIONS:
        for mode in lbp.MODES:
            cfg = ExtractionConfig(aggregation=agg, lbp_mode=mode)
            for variant in VARIANTS:
                table.setdefault(vector_length(variant, cfg), (variant, agg, mode))
    return table


# every combination produces a unique length: {5, 20, 36, 41, 56, 256, 261, 276}
_LAYOUTS = _layout_table()


def infer_layout(length: int) -> tuple[str, str, str] | None:
    """(variant, aggregation, lbp_mode) for a stored vector length, if known."""
    return _LAYOUTS.get(length)


def extract(
    img: np.ndarray,
    variant: str,
    cfg: ExtractionConfig = ExtractionConfig(),
    label: str = "",
    source: str = "",
) -> FeatureVector:
    """Extract one feature vector from a grayscale image.

    The image is first resized to the working resolution. The GLCM block
    is computed on the quantized result, the LBP block on the raw 8-bit
    result, and the combined variant concatenates GLCM then LBP.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    work = resize(img, cfg.resize, cfg.resize)
    blocks = []
    if variant in ("glcm", "combined"):
        q = quantize(work, cfg.levels)
        blocks.append(glcm.glcm_feature_block(q, cfg.distance, cfg.aggregation))
    if variant in ("lbp", "combined"):
        blocks.append(lbp.lbp_histogram(work, lbp.LbpConfig(cfg.lbp_mode)).bins)
    values = np.concatenate(blocks)
    if not np.all(np.isfinite(values)):
        raise ValueError("extracted feature vector contains non-finite values")
    return FeatureVector(values=values, label=label, source=source, variant=variant)


@dataclass(frozen=True, eq=False)
class Standardizer:
    """Per-dimension mean and population stddev fitted on training data."""

    mean: np.ndarray
    std: np.ndarray

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def transform(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if values.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"standardizer is {self.dim}-dimensional, got {values.shape[-1]}"
            )
        return (values - self.mean) / self.std

    def inverse(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if values.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"standardizer is {self.dim}-dimensional, got {values.shape[-1]}"
            )
        return values * self.std + self.mean


def fit_standardizer(train: list[FeatureVector]) -> Standardizer:
    """Fit per-dimension mean and population stddev, floored at 1e-12."""
    if len(train) < 2:
        raise EmptyTrainingSetError(f"need at least 2 vectors to fit, got {len(train)}")
    lengths = {v.values.shape[0] for v in train}
    if len(lengths) != 1:
        raise MixedLengthsError(f"mixed vector lengths {sorted(lengths)}")
    x = np.stack([v.values for v in train]).astype(np.float64)
    mean = x.mean(axis=0)
    std = np.sqrt(((x - mean) ** 2).mean(axis=0))
    return Standardizer(mean=mean, std=np.maximum(std, STDDEV_FLOOR))


def apply_standardizer(s: Standardizer, v: FeatureVector) -> FeatureVector:
    return FeatureVector(
        values=s.transform(v.values), label=v.label, source=v.source, variant=v.variant
    )


STANDARDIZER_FORMAT = "texclass-standardizer"


def save_standardizer(s: Standardizer, path) -> None:
    payload = {
        "format": STANDARDIZER_FORMAT,
        "version": 1,
        "mean": [float(x) for x in s.mean],
        "std": [float(x) for x in s.std],
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_standardizer(path) -> Standardizer:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or payload.get("format") != STANDARDIZER_FORMAT:
        raise SchemaMismatchError("not a texclass standardizer file")
    return Standardizer(
        mean=np.array(payload["mean"], dtype=np.float64),
        std=np.array(payload["std"], dtype=np.float64),
    )


def save_features(vectors: list[FeatureVector], path) -> None:
    """Write vectors as CSV: header ``source,label,f0..fN``, one row each.

    Floats are written in shortest round-trip decimal form, so a load of
    the file reproduces them bit-exactly.
    """
    n_features = vectors[0].values.shape[0] if vectors else 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "label"] + [f"f{i}" for i in range(n_features)])
        for v in vectors:
            if v.values.shape[0] != n_features:
                raise MixedLengthsError(
                    f"vector from {v.source!r} has length {v.values.shape[0]}, "
                    f"expected {n_features}"
                )
            writer.writerow([v.source, v.label] + [repr(float(x)) for x in v.values])


def load_features(path, variant: str | None = None, length: int | None = None) -> list[FeatureVector]:
    """Read a feature CSV back into vectors.

    When ``variant`` or ``length`` is given the header is validated
    against it; otherwise the variant is inferred from the stored length
    where that is unambiguous.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError("feature CSV is empty, expected a header row") from None
        if header[:2] != ["source", "label"]:
            raise SchemaMismatchError(f"feature CSV must start with source,label columns, got {header[:2]}")
        expected_fs = [f"f{i}" for i in range(len(header) - 2)]
        if header[2:] != expected_fs:
            raise SchemaMismatchError("feature columns must be named f0..fN in order")
        n_features = len(header) - 2

        if length is not None and n_features != length:
            raise SchemaMismatchError(f"feature CSV has {n_features} columns, expected {length}")
        if variant is not None:
            if variant not in VARIANTS:
                raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
            possible = {
                vector_length(variant, ExtractionConfig(aggregation=a, lbp_mode=m))
                for a in glcm.AGGREGATIONS
                for m in lbp.MODES
            }
            if n_features not in possible:
                raise SchemaMismatchError(
                    f"{n_features} feature columns do not match any {variant} layout {sorted(possible)}"
                )
            stored_variant = variant
        else:
            layout = infer_layout(n_features)
            stored_variant = layout[0] if layout else None

        vectors = []
        for row in reader:
            if len(row) != n_features + 2:
                raise SchemaMismatchError(
                    f"row {len(vectors) + 2} has {len(row)} fields, expected {n_features + 2}"
                )
            try:
                values = np.array([float(x) for x in row[2:]], dtype=np.float64)
            except ValueError as exc:
                raise SchemaMismatchError(f"row {len(vectors) + 2}: {exc}") from None
            vectors.append(
                FeatureVector(values=values, label=row[1], source=row[0], variant=stored_variant)
            )
    return vectors
