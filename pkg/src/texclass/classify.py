"""KNN, random-forest and soft-voting-ensemble classifiers.

All three predictors return a label plus a per-class score vector that
sums to one, with the class order fixed by the model's ``classes`` tuple.
Randomness in forest training is confined to per-tree generator streams
derived from (seed, tree index), so training is a deterministic function
of the data order, the configuration and the seed, and trees could be
grown concurrently without changing the result.

Tie handling is deterministic everywhere: equal distances prefer the
lower training index, equal split impurities prefer the lower feature
index then the lower threshold, and equal class scores prefer the lower
class index, except that KNN breaks score ties with the class of the
nearest neighbor belonging to a tied class.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InsufficientDataError,
    UnknownLabelError,
    VersionMismatchError,
)

MODEL_FORMAT = "texclass-model"
MODEL_VERSION = 1


def euclidean(p, q) -> float:
    """Euclidean distance between two equal-length vectors."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise DimensionMismatchError(f"cannot compare shapes {p.shape} and {q.shape}")
    d = p - q
    return float(np.sqrt(np.sum(d * d)))


def _class_indices(labels, classes: tuple[str, ...]) -> np.ndarray:
    index = {c: i for i, c in enumerate(classes)}
    try:
        return np.array([index[l] for l in labels], dtype=np.int64)
    except KeyError as exc:
        raise UnknownLabelError(f"label {exc.args[0]!r} not in classes {classes}") from None


# ---------------------------------------------------------------------------
# KNN


@dataclass(eq=False)
class KnnModel:
    k: int
    train: np.ndarray
    labels: np.ndarray
    classes: tuple[str, ...]
    pipeline: dict | None = None


def knn_fit(x, labels, k: int = 5, classes=None) -> KnnModel:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != len(labels):
        raise InsufficientDataError("training matrix and labels disagree")
    if k < 1 or k % 2 == 0:
        raise ValueError(f"k must be a positive odd number, got {k}")
    if k > x.shape[0]:
        raise InsufficientDataError(f"k={k} exceeds the {x.shape[0]} training vectors")
    classes = tuple(classes) if classes is not None else tuple(sorted(set(labels)))
    return KnnModel(k=k, train=x, labels=_class_indices(labels, classes), classes=classes)


def knn_predict(m: KnnModel, v) -> tuple[str, np.ndarray]:
    """Majority vote among the k nearest training vectors.

    Distance ties prefer the lower training index; score ties go to the
    class of the nearest neighbor that belongs to a tied class.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (m.train.shape[1],):
        raise DimensionMismatchError(
            f"model expects {m.train.shape[1]} features, got {v.shape}"
        )
    diff = m.train - v
    d2 = np.sum(diff * diff, axis=1)
    nearest = np.argsort(d2, kind="stable")[: m.k]
    neighbor_labels = m.labels[nearest]
    scores = np.bincount(neighbor_labels, minlength=len(m.classes)) / float(m.k)
    tied = np.flatnonzero(scores == scores.max())
    if tied.size == 1:
        winner = int(tied[0])
    else:
        tied_set = {int(t) for t in tied}
        winner = next(int(c) for c in neighbor_labels if int(c) in tied_set)
    return m.classes[winner], scores


# ---------------------------------------------------------------------------
# Random forest


@dataclass(eq=False)
class RfModel:
    trees: list
    classes: tuple[str, ...]
    n_features: int
    max_features: int
    seed: int
    single_class: bool = False
    pipeline: dict | None = None


def _gini(counts: np.ndarray, n: float) -> float:
    p = counts / n
    return float(1.0 - np.sum(p * p))


def _best_split(x_node, y_node, feats, total_counts, n_classes):
    """Lowest weighted-Gini (feature, threshold) over midpoint candidates.

    Returns None when no candidate strictly reduces the node impurity.
    """
    n_node = float(len(y_node))
    parent = _gini(total_counts.astype(np.float64), n_node)
    eye = np.eye(n_classes, dtype=np.int64)
    best_w = None
    best = None
    for f in feats:
        v = x_node[:, f]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        cut = np.flatnonzero(sv[:-1] != sv[1:])
        if cut.size == 0:
            continue
        cum = np.cumsum(eye[y_node[order]], axis=0)
        c_left = cum[cut].astype(np.float64)
        n_left = (cut + 1).astype(np.float64)
        c_right = (total_counts - cum[cut]).astype(np.float64)
        n_right = n_node - n_left
        p_left = c_left / n_left[:, None]
        p_right = c_right / n_right[:, None]
        g_left = 1.0 - np.sum(p_left * p_left, axis=1)
        g_right = 1.0 - np.sum(p_right * p_right, axis=1)
        weighted = (n_left * g_left + n_right * g_right) / n_node
        k = int(np.argmin(weighted))
        if best_w is None or weighted[k] < best_w:
            best_w = float(weighted[k])
            best = (int(f), float((sv[cut[k]] + sv[cut[k] + 1]) / 2.0))
    if best_w is None or not best_w < parent:
        return None
    return best


def _grow_tree(x, y, n_classes, max_features, rng) -> dict:
    """Grow one unpruned tree; nodes are plain dicts, leaves hold class
    frequencies. Expansion is preorder (left first), which fixes the order
    in which the generator is consumed for per-node feature draws."""
    dim = x.shape[1]
    root: dict = {}
    stack = [(root, np.arange(x.shape[0]))]
    while stack:
        node, idx = stack.pop()
        counts = np.bincount(y[idx], minlength=n_classes)
        n_node = idx.size
        if n_node < 2 or int((counts > 0).sum()) < 2:
            node["leaf"] = (counts / n_node).tolist()
            continue
        feats = np.sort(rng.choice(dim, size=max_features, replace=False))
        split = _best_split(x[idx], y[idx], feats, counts, n_classes)
        if split is None:
            node["leaf"] = (counts / n_node).tolist()
            continue
        f, thr = split
        mask = x[idx, f] <= thr
        if mask.all() or not mask.any():
            # midpoint rounded onto an endpoint; nothing to separate
            node["leaf"] = (counts / n_node).tolist()
            continue
        node["feature"] = f
        node["threshold"] = thr
        node["left"] = {}
        node["right"] = {}
        stack.append((node["right"], idx[~mask]))
        stack.append((node["left"], idx[mask]))
    return root


def rf_train(
    x,
    labels,
    n_trees: int = 100,
    max_features: int | None = None,
    seed: int = 0,
    classes=None,
) -> RfModel:
    """Train a bootstrap forest of unpruned Gini trees.

    Tree t draws its bootstrap sample and all of its per-node feature
    subsets from a generator seeded with (seed, t). Candidate thresholds
    are midpoints between consecutive distinct sorted values; a node
    stops when pure, smaller than 2 samples, or no split reduces
    impurity. Single-class input degenerates to a constant predictor and
    warns instead of failing.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != len(labels):
        raise InsufficientDataError("training matrix and labels disagree")
    n, dim = x.shape
    if n < 2:
        raise InsufficientDataError(f"need at least 2 training samples, got {n}")
    if n_trees < 1:
        raise ValueError(f"tree count must be >= 1, got {n_trees}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    classes = tuple(classes) if classes is not None else tuple(sorted(set(labels)))
    y = _class_indices(labels, classes)
    single_class = len(set(labels)) < 2
    if single_class:
        warnings.warn("training labels contain a single class; the forest predicts a constant")
    if max_features is None:
        max_features = int(round(math.sqrt(dim)))
    max_features = max(1, min(max_features, dim))
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
        boot = rng.integers(0, n, size=n)
        trees.append(_grow_tree(x[boot], y[boot], len(classes), max_features, rng))
    return RfModel(
        trees=trees,
        classes=classes,
        n_features=dim,
        max_features=max_features,
        seed=seed,
        single_class=single_class,
    )


def _leaf_for(tree: dict, v: np.ndarray) -> list:
    node = tree
    while "leaf" not in node:
        node = node["left"] if v[node["feature"]] <= node["threshold"] else node["right"]
    return node["leaf"]


def rf_predict(m: RfModel, v) -> tuple[str, np.ndarray]:
    """Average the leaf class frequencies over all trees."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (m.n_features,):
        raise DimensionMismatchError(f"model expects {m.n_features} features, got {v.shape}")
    scores = np.zeros(len(m.classes))
    for tree in m.trees:
        scores += np.asarray(_leaf_for(tree, v))
    scores /= len(m.trees)
    return m.classes[int(np.argmax(scores))], scores


# ---------------------------------------------------------------------------
# Voting ensemble


@dataclass(eq=False)
class EnsembleModel:
    """Soft-voting pair: the mean of the KNN and forest score vectors."""

    knn: KnnModel
    rf: RfModel
    pipeline: dict | None = None

    def __post_init__(self):
        if self.knn.classes != self.rf.classes:
            raise ValueError("ensemble members must share one ordered class list")

    @property
    def classes(self) -> tuple[str, ...]:
        return self.knn.classes


def ensemble_predict(m: EnsembleModel, v) -> tuple[str, np.ndarray]:
    _, knn_scores = knn_predict(m.knn, v)
    _, rf_scores = rf_predict(m.rf, v)
    scores = (knn_scores + rf_scores) / 2.0
    return m.classes[int(np.argmax(scores))], scores


def predict(model, v) -> tuple[str, np.ndarray]:
    if isinstance(model, KnnModel):
        return knn_predict(model, v)
    if isinstance(model, RfModel):
        return rf_predict(model, v)
    if isinstance(model, EnsembleModel):
        return ensemble_predict(model, v)
    raise TypeError(f"not a model: {type(model).__name__}")


# ---------------------------------------------------------------------------
# Persistence


def _model_body(model) -> dict:
    if isinstance(model, KnnModel):
        return {
            "kind": "knn",
            "classes": list(model.classes),
            "k": model.k,
            "train": [[float(x) for x in row] for row in model.train],
            "labels": [int(l) for l in model.labels],
        }
    if isinstance(model, RfModel):
        return {
            "kind": "rf",
            "classes": list(model.classes),
            "n_features": model.n_features,
            "max_features": model.max_features,
            "seed": model.seed,
            "single_class": model.single_class,
            "trees": model.trees,
        }
    if isinstance(model, EnsembleModel):
        return {
            "kind": "ensemble",
            "knn": _model_body(model.knn),
            "rf": _model_body(model.rf),
        }
    raise TypeError(f"not a model: {type(model).__name__}")


def _model_from_body(body: dict):
    kind = body.get("kind")
    if kind == "knn":
        return KnnModel(
            k=body["k"],
            train=np.array(body["train"], dtype=np.float64).reshape(len(body["labels"]), -1),
            labels=np.array(body["labels"], dtype=np.int64),
            classes=tuple(body["classes"]),
        )
    if kind == "rf":
        return RfModel(
            trees=body["trees"],
            classes=tuple(body["classes"]),
            n_features=body["n_features"],
            max_features=body["max_features"],
            seed=body["seed"],
            single_class=body["single_class"],
        )
    if kind == "ensemble":
        return EnsembleModel(knn=_model_from_body(body["knn"]), rf=_model_from_body(body["rf"]))
    raise VersionMismatchError(f"unknown model kind {kind!r}")


def save_model(model, path) -> None:
    """Write a model as versioned JSON; loading restores bit-identical
    predictions (floats round-trip through shortest-decimal repr)."""
    payload = {"format": MODEL_FORMAT, "version": MODEL_VERSION}
    payload.update(_model_body(model))
    if model.pipeline is not None:
        payload["pipeline"] = model.pipeline
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise VersionMismatchError("not a texclass model file")
    if payload.get("version") != MODEL_VERSION:
        raise VersionMismatchError(
            f"model format version {payload.get('version')!r} not supported"
        )
    model = _model_from_body(payload)
    model.pipeline = payload.get("pipeline")
    return model
