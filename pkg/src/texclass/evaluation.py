"""Train/test splitting, confusion matrices, metrics and the 7-cell grid.

The grid evaluates {combined, lbp, glcm} x {knn, rf} plus the voting
ensemble on the combined features, all on one split derived from one
seed. Reported precision, recall and F1 are support-weighted by default,
which makes weighted recall algebraically identical to accuracy; macro
averaging is available behind a flag.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import classify, config
from .dataset import DatasetManifest, extract_entries
from .errors import (
    ClassTooSmallError,
    EmptyMatrixError,
    InsufficientDataError,
    LengthMismatchError,
    TexclassError,
    UnknownLabelError,
)
from .features import FeatureVector, fit_standardizer
from .glcm import block_length

GRID_CELLS = (
    ("combined", "knn"),
    ("combined", "rf"),
    ("lbp", "knn"),
    ("lbp", "rf"),
    ("glcm", "knn"),
    ("glcm", "rf"),
    ("combined", "ve"),
)

_MODEL_TITLES = {"knn": "KNN", "rf": "RF", "ve": "VE"}


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.9
    stratified: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")


def split_indices(labels, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic train/test index partition, stratified by default.

    Per-class counts use round(n * fraction) clamped so that every class
    keeps at least one sample on each side. Indices come back sorted, so
    the partition is a function of (labels, spec) alone.
    """
    labels = np.asarray(labels, dtype=object)
    n = labels.shape[0]
    rng = np.random.default_rng(spec.seed)
    if not spec.stratified:
        if n < 2:
            raise InsufficientDataError(f"need at least 2 samples to split, got {n}")
        perm = rng.permutation(n)
        n_train = min(max(int(math.floor(n * spec.train_fraction + 0.5)), 1), n - 1)
        return np.sort(perm[:n_train]), np.sort(perm[n_train:])
    train: list[np.ndarray] = []
    test: list[np.ndarray] = []
    for cls in sorted(set(labels)):
        idx = np.flatnonzero(labels == cls)
        if idx.size < 2:
            raise ClassTooSmallError(
                f"class {cls!r} has {idx.size} sample(s); stratified split needs >= 2"
            )
        perm = rng.permutation(idx)
        n_train = min(max(int(math.floor(idx.size * spec.train_fraction + 0.5)), 1), idx.size - 1)
        train.append(perm[:n_train])
        test.append(perm[n_train:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def split(data: list[FeatureVector], spec: SplitSpec) -> tuple[list[FeatureVector], list[FeatureVector]]:
    train_idx, test_idx = split_indices([v.label for v in data], spec)
    return [data[i] for i in train_idx], [data[i] for i in test_idx]


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Counts with rows = actual class, columns = predicted class."""

    classes: tuple[str, ...]
    counts: np.ndarray


def confusion(actual, predicted, classes) -> ConfusionMatrix:
    if len(actual) != len(predicted):
        raise LengthMismatchError(
            f"{len(actual)} actual vs {len(predicted)} predicted labels"
        )
    classes = tuple(classes)
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for a, p in zip(actual, predicted):
        if a not in index:
            raise UnknownLabelError(f"actual label {a!r} not in classes {classes}")
        if p not in index:
            raise UnknownLabelError(f"predicted label {p!r} not in classes {classes}")
        counts[index[a], index[p]] += 1
    return ConfusionMatrix(classes=classes, counts=counts)


@dataclass(frozen=True)
class Metrics:
    """Percentages, full precision; round only when rendering."""

    accuracy: float
    precision: float
    recall: float
    f1: float


def metrics(cm: ConfusionMatrix, average: str = "weighted") -> Metrics:
    """Accuracy plus averaged per-class precision, recall and F1.

    Per-class values use the 0-when-undefined convention (empty row,
    empty column, or a zero precision+recall sum). Support weighting
    makes the averaged recall equal accuracy; ``average="macro"`` takes
    unweighted class means instead.
    """
    if average not in ("weighted", "macro"):
        raise ValueError(f"average must be weighted or macro, got {average!r}")
    counts = cm.counts.astype(np.float64)
    total = counts.sum()
    if total < 1:
        raise EmptyMatrixError("confusion matrix has no samples")
    tp = np.diag(counts)
    row = counts.sum(axis=1)
    col = counts.sum(axis=0)
    precision_c = np.divide(tp, col, out=np.zeros_like(tp), where=col > 0)
    recall_c = np.divide(tp, row, out=np.zeros_like(tp), where=row > 0)
    pr = precision_c + recall_c
    f1_c = np.divide(2.0 * precision_c * recall_c, pr, out=np.zeros_like(tp), where=pr > 0)
    if average == "weighted":
        w = row / total
        p, r, f = (w * precision_c).sum(), (w * recall_c).sum(), (w * f1_c).sum()
    else:
        p, r, f = precision_c.mean(), recall_c.mean(), f1_c.mean()
    return Metrics(
        accuracy=float(100.0 * tp.sum() / total),
        precision=float(100.0 * p),
        recall=float(100.0 * r),
        f1=float(100.0 * f),
    )


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    model: str
    variant: str
    metrics: Metrics
    confusion: ConfusionMatrix


@dataclass(eq=False)
class GridCell:
    name: str
    variant: str
    model: str
    report: EvaluationReport | None = None
    error: str | None = None


def _slice_variant(combined: list[FeatureVector], variant: str, glcm_len: int) -> list[FeatureVector]:
    if variant == "combined":
        return combined
    sl = slice(0, glcm_len) if variant == "glcm" else slice(glcm_len, None)
    return [
        FeatureVector(values=v.values[sl], label=v.label, source=v.source, variant=variant)
        for v in combined
    ]


def _run_cell(vectors, train_idx, test_idx, classes, model_kind, cfg, cell_seed):
    train = [vectors[i] for i in train_idx]
    test = [vectors[i] for i in test_idx]
    if cfg.standardize:
        scaler = fit_standardizer(train)
        x_train = scaler.transform(np.stack([v.values for v in train]))
        x_test = scaler.transform(np.stack([v.values for v in test]))
    else:
        x_train = np.stack([v.values for v in train])
        x_test = np.stack([v.values for v in test])
    labels_train = [v.label for v in train]
    if model_kind == "knn":
        model = classify.knn_fit(x_train, labels_train, k=cfg.k, classes=classes)
    elif model_kind == "rf":
        model = classify.rf_train(
            x_train, labels_train, n_trees=cfg.trees,
            max_features=cfg.max_features, seed=cell_seed, classes=classes,
        )
    else:
        model = classify.EnsembleModel(
            knn=classify.knn_fit(x_train, labels_train, k=cfg.k, classes=classes),
            rf=classify.rf_train(
                x_train, labels_train, n_trees=cfg.trees,
                max_features=cfg.max_features, seed=cell_seed, classes=classes,
            ),
        )
    predicted = [classify.predict(model, x)[0] for x in x_test]
    actual = [v.label for v in test]
    cm = confusion(actual, predicted, classes)
    return EvaluationReport(
        model=_MODEL_TITLES[model_kind],
        variant=variant_title(vectors[0].variant or ""),
        metrics=metrics(cm),
        confusion=cm,
    )


def variant_title(variant: str) -> str:
    return {"glcm": "GLCM", "lbp": "LBP", "combined": "combined"}.get(variant, variant)


def grid_on_features(
    combined: list[FeatureVector], classes, cfg: config.PipelineConfig
) -> list[GridCell]:
    """Evaluate all seven grid cells from combined-variant vectors.

    The GLCM and LBP cells reuse slices of the combined vectors (the
    concatenation order makes the slices bit-identical to separate
    extractions). All cells share one split; a cell that fails is
    reported with its error and does not stop the rest of the grid.
    """
    cfg.validate()
    glcm_len = block_length(cfg.aggregation)
    by_variant = {v: _slice_variant(combined, v, glcm_len) for v in ("combined", "lbp", "glcm")}
    labels = [v.label for v in combined]
    spec = SplitSpec(
        train_fraction=cfg.train_fraction,
        stratified=cfg.stratify,
        seed=config.derive_seed(cfg.seed, config.SALT_SPLIT),
    )
    train_idx, test_idx = split_indices(labels, spec)
    classes = tuple(classes)
    cells = []
    for cell_index, (variant, model_kind) in enumerate(GRID_CELLS):
        cell = GridCell(name=f"{variant}+{model_kind}", variant=variant, model=model_kind)
        try:
            cell.report = _run_cell(
                by_variant[variant], train_idx, test_idx, classes, model_kind, cfg,
                cell_seed=config.derive_seed(cfg.seed, config.SALT_MODEL, cell_index),
            )
        except Exception as exc:  # a broken cell must not sink the grid
            cell.error = f"{type(exc).__name__}: {exc}"
        cells.append(cell)
    return cells


def run_grid(manifest: DatasetManifest, cfg: config.PipelineConfig) -> list[GridCell]:
    """Extract combined features from a dataset and evaluate the grid."""
    cfg.validate()
    combined, failures = extract_entries(manifest, "combined", cfg.extraction())
    if failures:
        bad = ", ".join(path for path, _ in failures[:5])
        raise TexclassError(f"{len(failures)} image(s) failed extraction: {bad}")
    return grid_on_features(combined, manifest.classes, cfg)


# ---------------------------------------------------------------------------
# report rendering


def render_table(cells: list[GridCell]) -> str:
    """Aligned text table, one row per grid cell, percentages at 2 dp."""
    header = ("Model", "Accuracy (%)", "Precision (%)", "Recall (%)", "F1-score (%)")
    rows = [header]
    for cell in cells:
        title = f"{variant_title(cell.variant)} + {_MODEL_TITLES[cell.model]}"
        if cell.report is None:
            rows.append((title, "FAILED", cell.error or "", "", ""))
        else:
            m = cell.report.metrics
            rows.append(
                (title, f"{m.accuracy:.2f}", f"{m.precision:.2f}", f"{m.recall:.2f}", f"{m.f1:.2f}")
            )
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def grid_as_dict(cells: list[GridCell], cfg: config.PipelineConfig) -> dict:
    """Full-precision JSON payload: effective config plus one entry per cell."""
    out_cells = []
    for cell in cells:
        entry: dict = {"name": cell.name, "variant": cell.variant, "model": cell.model}
        if cell.report is None:
            entry["error"] = cell.error
        else:
            m = cell.report.metrics
            entry.update(
                accuracy=m.accuracy,
                precision=m.precision,
                recall=m.recall,
                f1=m.f1,
                rounded={
                    "accuracy": round(m.accuracy, 2),
                    "precision": round(m.precision, 2),
                    "recall": round(m.recall, 2),
                    "f1": round(m.f1, 2),
                },
                classes=list(cell.report.confusion.classes),
                confusion=cell.report.confusion.counts.tolist(),
            )
        out_cells.append(entry)
    return {"config": cfg.as_dict(), "cells": out_cells}


def write_grid_reports(cells: list[GridCell], cfg: config.PipelineConfig, out_dir) -> None:
    """Write report.txt, report.json and one confusion CSV per cell.

    The text report ends with the effective configuration, so every
    report records how it was produced.
    """
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    footer = "".join(f"# {key} = {value}\n" for key, value in sorted(cfg.as_dict().items()))
    (out / "report.txt").write_text(render_table(cells) + "\n" + footer, encoding="utf-8")
    with open(out / "report.json", "w", encoding="utf-8", newline="") as fh:
        json.dump(grid_as_dict(cells, cfg), fh, indent=1, sort_keys=True)
        fh.write("\n")
    for cell in cells:
        if cell.report is None:
            continue
        write_confusion_csv(cell.report.confusion, out / f"confusion_{cell.variant}_{cell.model}.csv")


def write_confusion_csv(cm: ConfusionMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("actual\\predicted," + ",".join(cm.classes) + "\n")
        for cls, row in zip(cm.classes, cm.counts):
            fh.write(cls + "," + ",".join(str(int(c)) for c in row) + "\n")
