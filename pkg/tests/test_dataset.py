"""Ingestion, rotation augmentation and the synthetic generator."""

import numpy as np
import pytest

from texclass import dataset
from texclass.errors import BadSpecError, CorruptFileError, EmptyDatasetError, NoClassesError
from texclass.imaging import load_image, save_pgm


def _write_tree(root, classes, per_class=2):
    rng = np.random.default_rng(1)
    for cls in classes:
        (root / cls).mkdir(parents=True)
        for i in range(per_class):
            save_pgm(rng.integers(0, 256, (8, 8), dtype=np.uint8), root / cls / f"{cls}_{i}.pgm")


def test_ingest_basic(tmp_path):
    _write_tree(tmp_path, ["a", "b"])
    manifest = dataset.ingest(tmp_path)
    assert manifest.classes == ("a", "b")
    assert len(manifest.entries) == 4
    assert manifest.skipped == 0
    assert [e.path for e in manifest.entries] == sorted(e.path for e in manifest.entries)
    again = dataset.ingest(tmp_path)
    assert again.classes == manifest.classes
    assert again.entries == manifest.entries


def test_ingest_skips_non_images(tmp_path):
    _write_tree(tmp_path, ["a"])
    (tmp_path / "a" / "notes.txt").write_text("not an image", encoding="utf-8")
    manifest = dataset.ingest(tmp_path)
    assert len(manifest.entries) == 2
    assert manifest.skipped == 1


def test_ingest_errors(tmp_path):
    with pytest.raises(NoClassesError):
        dataset.ingest(tmp_path)
    (tmp_path / "empty_class").mkdir()
    with pytest.raises(EmptyDatasetError):
        dataset.ingest(tmp_path)


def test_manifest_roundtrip(tmp_path):
    _write_tree(tmp_path, ["x", "y"], per_class=3)
    manifest = dataset.ingest(tmp_path)
    dataset.save_manifest(manifest, tmp_path / "manifest.csv")
    back = dataset.load_manifest(tmp_path / "manifest.csv")
    assert back.classes == manifest.classes
    assert back.entries == manifest.entries
    assert back.root == tmp_path


def test_manifest_bad_header(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(CorruptFileError):
        dataset.load_manifest(p)


def test_augment_counts_and_angles(tmp_path):
    _write_tree(tmp_path, ["a", "b"], per_class=5)
    manifest = dataset.ingest(tmp_path)
    out = dataset.augment_rotations(manifest, 5.0, 9, tmp_path)
    assert len(out.entries) == 10 * (9 + 1)
    assert len({e.path for e in out.entries}) == len(out.entries)  # paths unique
    angles = sorted(
        {e.provenance for e in out.entries if e.provenance != "original"}
    )
    assert set(angles) == {f"rotated({a})" for a in range(5, 50, 5)}
    originals = [e for e in out.entries if e.provenance == "original"]
    assert len(originals) == 10
    # per-class proportions unchanged
    for cls in ("a", "b"):
        assert sum(1 for e in out.entries if e.label == cls) == 50
    # every referenced file exists and decodes
    for e in out.entries[:12]:
        assert load_image(out.resolve(e)).shape == (8, 8)


def test_augment_into_separate_directory(tmp_path):
    src = tmp_path / "src"
    dst = tmp_path / "dst"
    _write_tree(src, ["a"], per_class=2)
    manifest = dataset.ingest(src)
    out = dataset.augment_rotations(manifest, 10.0, 2, dst)
    assert out.root == dst
    assert len(out.entries) == 6
    for e in out.entries:
        assert (dst / e.path).exists()


def test_augment_provenance_roundtrip(tmp_path):
    _write_tree(tmp_path, ["a"], per_class=2)
    manifest = dataset.augment_rotations(dataset.ingest(tmp_path), 7.5, 3, tmp_path)
    dataset.save_manifest(manifest, tmp_path / "manifest.csv")
    back = dataset.load_manifest(tmp_path / "manifest.csv")
    assert back.entries == manifest.entries
    assert "rotated(22.5)" in {e.provenance for e in back.entries}


def test_augment_validation(tmp_path):
    _write_tree(tmp_path, ["a"])
    manifest = dataset.ingest(tmp_path)
    with pytest.raises(BadSpecError):
        dataset.augment_rotations(manifest, 40.0, 9, tmp_path)  # 360 wraps
    with pytest.raises(BadSpecError):
        dataset.augment_rotations(manifest, -5.0, 2, tmp_path)


def test_generate_counts_and_determinism(tmp_path):
    spec = dataset.SyntheticSpec(per_class=4, size=32, seed=9)
    m1 = dataset.generate_synthetic(spec, tmp_path / "one")
    assert m1.classes == ("blobs", "checkerboard", "stripes")
    assert len(m1.entries) == 12
    m2 = dataset.generate_synthetic(spec, tmp_path / "two")
    for e1, e2 in zip(m1.entries, m2.entries):
        assert e1.path == e2.path
        a = (tmp_path / "one" / e1.path).read_bytes()
        b = (tmp_path / "two" / e2.path).read_bytes()
        assert a == b  # bit-identical regeneration
    other = dataset.generate_synthetic(
        dataset.SyntheticSpec(per_class=4, size=32, seed=10), tmp_path / "three"
    )
    diffs = sum(
        (tmp_path / "one" / e1.path).read_bytes() != (tmp_path / "three" / e2.path).read_bytes()
        for e1, e2 in zip(m1.entries, other.entries)
    )
    assert diffs > 0


def test_generate_images_are_nonconstant(tmp_path):
    spec = dataset.SyntheticSpec(per_class=3, size=32, seed=2)
    manifest = dataset.generate_synthetic(spec, tmp_path)
    for e in manifest.entries:
        img = load_image(manifest.resolve(e))
        assert img.shape == (32, 32)
        assert img.max() > img.min()


def test_generate_default_counts(tmp_path):
    manifest = dataset.generate_synthetic(dataset.SyntheticSpec(seed=1), tmp_path)
    assert len(manifest.entries) == 60
    per_class = {c: 0 for c in manifest.classes}
    for e in manifest.entries:
        per_class[e.label] += 1
    assert set(per_class.values()) == {20}


def test_generate_spec_validation(tmp_path):
    with pytest.raises(BadSpecError):
        dataset.generate_synthetic(dataset.SyntheticSpec(per_class=0), tmp_path)
    with pytest.raises(BadSpecError):
        dataset.generate_synthetic(dataset.SyntheticSpec(size=4), tmp_path)
    with pytest.raises(BadSpecError):
        dataset.generate_synthetic(dataset.SyntheticSpec(classes=("alien",)), tmp_path)
    with pytest.raises(BadSpecError):
        dataset.generate_synthetic(dataset.SyntheticSpec(noise_sigma=(5.0, 1.0)), tmp_path)


def test_generated_classes_are_separable(tmp_path):
    # seeded regression: combined features keep classes further apart than
    # samples within one class (ratio observed 1.586 under the default seed)
    import itertools

    from texclass.features import ExtractionConfig

    manifest = dataset.generate_synthetic(dataset.SyntheticSpec(), tmp_path)
    vectors, failures = dataset.extract_entries(manifest, "combined", ExtractionConfig())
    assert not failures
    x = np.stack([v.values for v in vectors])
    labels = [v.label for v in vectors]
    within, between = [], []
    for i, j in itertools.combinations(range(len(labels)), 2):
        d = float(np.linalg.norm(x[i] - x[j]))
        (within if labels[i] == labels[j] else between).append(d)
    ratio = np.mean(between) / np.mean(within)
    assert ratio > 1.5


def test_extract_entries_reports_failures(tmp_path):
    _write_tree(tmp_path, ["a"], per_class=2)
    bad = tmp_path / "a" / "broken.pgm"
    bad.write_bytes(b"P5\n4 4\n255\nxx")  # truncated
    manifest = dataset.ingest(tmp_path)
    assert len(manifest.entries) == 3  # magic sniff admits it; decode later fails
    from texclass.features import ExtractionConfig

    vectors, failures = dataset.extract_entries(manifest, "glcm", ExtractionConfig(resize=8))
    assert len(vectors) == 2
    assert len(failures) == 1 and failures[0][0] == "a/broken.pgm"
