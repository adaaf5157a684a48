"""KNN, random forest and voting ensemble, against independent oracles."""

import json

import numpy as np
import pytest
from oracles import best_split_impurity_oracle, gini_oracle, knn_oracle

from texclass import classify
from texclass.errors import (
    DimensionMismatchError,
    InsufficientDataError,
    VersionMismatchError,
)


def test_euclidean_fixtures():
    assert classify.euclidean([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert classify.euclidean([0.0, 0.0], [3.0, 4.0]) == 5.0
    assert classify.euclidean([2.5], [7.0]) == 4.5
    with pytest.raises(DimensionMismatchError):
        classify.euclidean([1.0], [1.0, 2.0])


def test_knn_exact_match_wins():
    x = np.array([[0.0, 0.0], [5.0, 5.0], [9.0, 0.0]])
    m = classify.knn_fit(x, ["a", "b", "c"], k=1)
    label, scores = classify.knn_predict(m, np.array([5.0, 5.0]))
    assert label == "b"
    assert scores.tolist() == [0.0, 1.0, 0.0]


def test_knn_majority_scores():
    x = np.array([[0.0], [0.1], [10.0], [50.0], [60.0]])
    m = classify.knn_fit(x, ["A", "A", "B", "B", "B"], k=3)
    label, scores = classify.knn_predict(m, np.array([0.0]))
    assert label == "A"
    assert scores.tolist() == [2.0 / 3.0, 1.0 / 3.0]


def test_knn_distance_tie_prefers_lower_index():
    x = np.array([[1.0], [-1.0], [30.0]])
    m = classify.knn_fit(x, ["A", "B", "B"], k=1)
    label, _ = classify.knn_predict(m, np.array([0.0]))
    assert label == "A"  # same distance, index 0 first


def test_knn_score_tie_uses_nearest_tied_class():
    x = np.array([[1.0], [2.0], [3.0], [4.0]])
    m = classify.knn_fit(x, ["B", "A", "B", "A"], k=3)
    # neighbors of 0.0: [1(B), 2(A), 3(B)] -> B=2/3; of 4.5: [4(A),3(B),2(A)] -> A
    assert classify.knn_predict(m, np.array([0.0]))[0] == "B"
    assert classify.knn_predict(m, np.array([4.5]))[0] == "A"
    # three-way score tie across three classes
    x = np.array([[0.0], [1.0], [2.0]])
    m = classify.knn_fit(x, ["A", "B", "C"], k=3)
    label, scores = classify.knn_predict(m, np.array([1.6]))
    assert scores.tolist() == [1.0 / 3.0] * 3
    assert label == "C"  # nearest neighbor (2.0) belongs to a tied class


def test_knn_validation():
    x = np.array([[0.0], [1.0]])
    with pytest.raises(ValueError):
        classify.knn_fit(x, ["a", "b"], k=2)
    with pytest.raises(InsufficientDataError):
        classify.knn_fit(x, ["a", "b"], k=3)
    m = classify.knn_fit(x, ["a", "b"], k=1)
    with pytest.raises(DimensionMismatchError):
        classify.knn_predict(m, np.array([0.0, 1.0]))


def test_knn_matches_oracle():
    rng = np.random.default_rng(2024)
    for trial in range(60):
        n = int(rng.integers(5, 40))
        dim = int(rng.integers(2, 12))
        k = int(rng.choice([1, 3, 5]))
        if k > n:
            k = 1
        x = rng.normal(size=(n, dim))
        labels = [f"c{int(v)}" for v in rng.integers(0, 3, n)]
        m = classify.knn_fit(x, labels, k=k)
        label_to_idx = {c: i for i, c in enumerate(m.classes)}
        q = rng.normal(size=dim)
        got_label, got_scores = classify.knn_predict(m, q)
        want_idx, want_scores = knn_oracle(
            x.tolist(), [label_to_idx[l] for l in labels], len(m.classes), k, q.tolist()
        )
        assert got_label == m.classes[want_idx]
        assert got_scores.tolist() == want_scores


def test_knn_self_accuracy_with_k1():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(30, 4))
    labels = [f"c{int(v)}" for v in rng.integers(0, 3, 30)]
    m = classify.knn_fit(x, labels, k=1)
    for row, want in zip(x, labels):
        assert classify.knn_predict(m, row)[0] == want


def test_rf_single_tree_shatters_separated_data():
    # two classes, wide margin: any bootstrap with both classes separates them
    x = np.concatenate([np.arange(10.0), np.arange(100.0, 110.0)]).reshape(-1, 1)
    labels = ["lo"] * 10 + ["hi"] * 10
    m = classify.rf_train(x, labels, n_trees=1, max_features=1, seed=3)
    preds = [classify.rf_predict(m, row)[0] for row in x]
    assert preds == labels


def test_rf_determinism():
    rng = np.random.default_rng(6)
    x = rng.normal(size=(40, 5))
    labels = [f"c{int(v)}" for v in rng.integers(0, 3, 40)]
    a = classify.rf_train(x, labels, n_trees=12, seed=9)
    b = classify.rf_train(x, labels, n_trees=12, seed=9)
    assert a.trees == b.trees  # node-for-node identical
    c = classify.rf_train(x, labels, n_trees=12, seed=10)
    assert c.trees != a.trees


def test_rf_single_class_warns_and_predicts_constant():
    x = np.array([[0.0], [1.0], [2.0]])
    with pytest.warns(UserWarning):
        m = classify.rf_train(x, ["only", "only", "only"], n_trees=3, seed=0)
    assert m.single_class
    label, scores = classify.rf_predict(m, np.array([5.0]))
    assert label == "only"
    assert scores.tolist() == [1.0]


def test_rf_insufficient_data():
    with pytest.raises(InsufficientDataError):
        classify.rf_train(np.array([[1.0]]), ["a"], n_trees=1)


def test_rf_prediction_tie_breaks_to_lower_class():
    tree_a = {"leaf": [1.0, 0.0]}
    tree_b = {"leaf": [0.0, 1.0]}
    m = classify.RfModel(
        trees=[tree_a, tree_b], classes=("x", "y"), n_features=1,
        max_features=1, seed=0,
    )
    label, scores = classify.rf_predict(m, np.array([0.0]))
    assert scores.tolist() == [0.5, 0.5]
    assert label == "x"


def test_rf_single_pure_leaf_tree():
    m = classify.RfModel(
        trees=[{"leaf": [0.0, 1.0]}], classes=("a", "b"), n_features=2,
        max_features=1, seed=0,
    )
    label, scores = classify.rf_predict(m, np.array([1.0, 2.0]))
    assert label == "b" and scores.tolist() == [0.0, 1.0]


def test_rf_training_accuracy_on_separable_data():
    rng = np.random.default_rng(77)
    centers = np.array([[0.0, 0.0], [8.0, 8.0], [-8.0, 8.0]])
    x = np.concatenate([rng.normal(c, 1.0, size=(20, 2)) for c in centers])
    labels = [f"c{i}" for i in range(3) for _ in range(20)]
    m = classify.rf_train(x, labels, n_trees=100, seed=42)
    correct = sum(classify.rf_predict(m, row)[0] == want for row, want in zip(x, labels))
    # pinned under seed 42; bootstrap leaves ~37% of rows out per tree
    assert correct / len(labels) >= 0.95
    assert correct == 60


def test_gini_split_matches_exhaustive_enumeration():
    rng = np.random.default_rng(404)
    for trial in range(50):
        n = int(rng.integers(2, 9))
        dim = int(rng.integers(1, 4))
        x = np.round(rng.normal(size=(n, dim)), 2)
        y = rng.integers(0, 2, n)
        if len(set(y.tolist())) < 2:
            y[0] = 1 - y[0]
        feats = np.arange(dim)
        counts = np.bincount(y, minlength=2)
        split = classify._best_split(x, y, feats, counts, 2)
        best = best_split_impurity_oracle(x.tolist(), y.tolist(), feats.tolist(), 2)
        parent = gini_oracle(counts.tolist(), float(n))
        if split is None:
            assert best is None or not best < parent
            continue
        f, thr = split
        mask = x[:, f] <= thr
        nl, nr = float(mask.sum()), float((~mask).sum())
        cl = np.bincount(y[mask], minlength=2).tolist()
        cr = np.bincount(y[~mask], minlength=2).tolist()
        chosen = (nl * gini_oracle(cl, nl) + nr * gini_oracle(cr, nr)) / float(n)
        assert chosen == best
        assert chosen < parent


def test_ensemble_fixtures():
    x = np.array([[0.0], [10.0]])
    knn = classify.knn_fit(x, ["A", "B"], k=1)
    rf_agree = classify.RfModel(
        trees=[{"leaf": [1.0, 0.0]}], classes=("A", "B"), n_features=1,
        max_features=1, seed=0,
    )
    m = classify.EnsembleModel(knn=knn, rf=rf_agree)
    label, scores = classify.ensemble_predict(m, np.array([0.0]))
    assert label == "A" and scores.tolist() == [1.0, 0.0]

    rf_b = classify.RfModel(
        trees=[{"leaf": [0.0, 1.0]}], classes=("A", "B"), n_features=1,
        max_features=1, seed=0,
    )
    tie = classify.EnsembleModel(knn=knn, rf=rf_b)
    label, scores = classify.ensemble_predict(tie, np.array([0.0]))
    assert scores.tolist() == [0.5, 0.5]
    assert label == "A"  # lower class index


def test_ensemble_weighted_average():
    x = np.array([[0.0], [1.0], [10.0]])
    knn = classify.knn_fit(x, ["A", "A", "B"], k=3)  # scores 2/3, 1/3 everywhere
    rf = classify.RfModel(
        trees=[{"leaf": [0.0, 1.0]}], classes=("A", "B"), n_features=1,
        max_features=1, seed=0,
    )
    m = classify.EnsembleModel(knn=knn, rf=rf)
    label, scores = classify.ensemble_predict(m, np.array([0.0]))
    assert scores.tolist() == [1.0 / 3.0, 2.0 / 3.0]
    assert label == "B"


def test_ensemble_consensus_preserved():
    rng = np.random.default_rng(12)
    x = rng.normal(size=(30, 3))
    labels = [f"c{int(v)}" for v in rng.integers(0, 3, 30)]
    knn = classify.knn_fit(x, labels, k=3)
    rf = classify.rf_train(x, labels, n_trees=15, seed=1)
    ens = classify.EnsembleModel(knn=knn, rf=rf)
    for _ in range(40):
        q = rng.normal(size=3)
        kl, ks = classify.knn_predict(knn, q)
        rl, rs = classify.rf_predict(rf, q)
        el, es = classify.ensemble_predict(ens, q)
        assert abs(es.sum() - 1.0) <= 1e-9
        if kl == rl:
            assert el == kl


def test_ensemble_class_list_mismatch():
    x = np.array([[0.0], [1.0]])
    knn = classify.knn_fit(x, ["A", "B"], k=1)
    rf = classify.rf_train(x, ["A", "C"], n_trees=1, seed=0)
    with pytest.raises(ValueError):
        classify.EnsembleModel(knn=knn, rf=rf)


def test_scores_sum_to_one_everywhere():
    rng = np.random.default_rng(14)
    x = rng.normal(size=(25, 4))
    labels = [f"c{int(v)}" for v in rng.integers(0, 3, 25)]
    knn = classify.knn_fit(x, labels, k=5)
    rf = classify.rf_train(x, labels, n_trees=10, seed=2)
    ens = classify.EnsembleModel(knn=knn, rf=rf)
    for model, fn in ((knn, classify.knn_predict), (rf, classify.rf_predict), (ens, classify.ensemble_predict)):
        for _ in range(20):
            _, scores = fn(model, rng.normal(size=4))
            assert abs(scores.sum() - 1.0) <= 1e-9
            assert (scores >= 0).all()


def test_knn_model_roundtrip(tmp_path):
    rng = np.random.default_rng(15)
    x = rng.normal(size=(20, 6))
    labels = [f"c{int(v)}" for v in rng.integers(0, 3, 20)]
    m = classify.knn_fit(x, labels, k=3)
    path = tmp_path / "knn.json"
    classify.save_model(m, path)
    back = classify.load_model(path)
    assert isinstance(back, classify.KnnModel)
    assert back.classes == m.classes and back.k == m.k
    for _ in range(50):
        q = rng.normal(size=6)
        assert classify.knn_predict(m, q)[0] == classify.knn_predict(back, q)[0]
        assert classify.knn_predict(m, q)[1].tolist() == classify.knn_predict(back, q)[1].tolist()


def test_rf_model_roundtrip(tmp_path):
    rng = np.random.default_rng(16)
    x = rng.normal(size=(25, 4))
    labels = [f"c{int(v)}" for v in rng.integers(0, 2, 25)]
    m = classify.rf_train(x, labels, n_trees=7, seed=21)
    path = tmp_path / "rf.json"
    classify.save_model(m, path)
    back = classify.load_model(path)
    assert back.trees == m.trees  # node-by-node structural equality
    assert back.classes == m.classes
    assert back.n_features == m.n_features


def test_ensemble_model_roundtrip(tmp_path):
    rng = np.random.default_rng(17)
    x = rng.normal(size=(12, 3))
    labels = [f"c{int(v)}" for v in rng.integers(0, 2, 12)]
    m = classify.EnsembleModel(
        knn=classify.knn_fit(x, labels, k=1),
        rf=classify.rf_train(x, labels, n_trees=3, seed=4),
    )
    m.pipeline = {"variant": "combined", "resize": 128}
    path = tmp_path / "ens.json"
    classify.save_model(m, path)
    back = classify.load_model(path)
    assert isinstance(back, classify.EnsembleModel)
    assert back.pipeline == m.pipeline
    for _ in range(20):
        q = rng.normal(size=3)
        assert classify.ensemble_predict(m, q)[1].tolist() == classify.ensemble_predict(back, q)[1].tolist()


def test_load_rejects_corrupt_and_foreign_files(tmp_path):
    path = tmp_path / "m.json"
    path.write_text("{ definitely not json", encoding="utf-8")
    with pytest.raises((VersionMismatchError, json.JSONDecodeError)):
        classify.load_model(path)
    path.write_text(json.dumps({"hello": "world"}), encoding="utf-8")
    with pytest.raises(VersionMismatchError):
        classify.load_model(path)
    path.write_text(
        json.dumps({"format": classify.MODEL_FORMAT, "version": 99, "kind": "knn"}),
        encoding="utf-8",
    )
    with pytest.raises(VersionMismatchError):
        classify.load_model(path)


def test_retrain_writes_identical_bytes(tmp_path):
    rng = np.random.default_rng(18)
    x = rng.normal(size=(20, 4))
    labels = [f"c{int(v)}" for v in rng.integers(0, 2, 20)]
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    classify.save_model(classify.rf_train(x, labels, n_trees=9, seed=5), p1)
    classify.save_model(classify.rf_train(x, labels, n_trees=9, seed=5), p2)
    assert p1.read_bytes() == p2.read_bytes()
