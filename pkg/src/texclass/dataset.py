"""Dataset ingestion, rotation augmentation and synthetic texture generation.

A dataset is a directory with one subdirectory per class; the manifest
CSV (``path,label,provenance``) records every image relative to the
dataset root. The synthetic generator produces three texture families
(checkerboards, sinusoidal stripes, thresholded blob noise) with
per-image parameter jitter and additive noise, deterministically from a
seed, as a self-contained stand-in for a real image collection.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadSpecError,
    CorruptFileError,
    EmptyDatasetError,
    NoClassesError,
    TexclassError,
)
from .features import ExtractionConfig, FeatureVector, extract
from .imaging import load_image, rotate, save_pgm

_NETPBM_MAGIC = (b"P2", b"P3", b"P5", b"P6")
_PILLOW_SUFFIXES = {".png", ".bmp", ".jpg", ".jpeg", ".tif", ".tiff"}


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: str
    provenance: str = "original"


@dataclass(eq=False)
class DatasetManifest:
    classes: tuple[str, ...]
    entries: list[ManifestEntry]
    root: Path | None = None
    skipped: int = 0

    def resolve(self, entry: ManifestEntry) -> Path:
        if self.root is None:
            return Path(entry.path)
        return self.root / entry.path


def ingest(root) -> DatasetManifest:
    """Scan a class-per-directory tree into a manifest.

    Classes and entries are sorted lexicographically, so two scans of the
    same tree produce identical manifests. Files that are not readable
    images are skipped and counted in ``skipped``.
    """
    root = Path(root)
    class_dirs = sorted(d for d in root.iterdir() if d.is_dir())
    if not class_dirs:
        raise NoClassesError(f"no class subdirectories under {root}")
    entries: list[ManifestEntry] = []
    skipped = 0
    for class_dir in class_dirs:
        for path in sorted(p for p in class_dir.iterdir() if p.is_file()):
            if _looks_like_image(path):
                entries.append(
                    ManifestEntry(path=f"{class_dir.name}/{path.name}", label=class_dir.name)
                )
            else:
                skipped += 1
    if not entries:
        raise EmptyDatasetError(f"class directories under {root} contain no readable images")
    classes = tuple(d.name for d in class_dirs)
    return DatasetManifest(classes=classes, entries=entries, root=root, skipped=skipped)


def _looks_like_image(path: Path) -> bool:
    try:
        with open(path, "rb") as fh:
            magic = fh.read(2)
    except OSError:
        return False
    if magic in _NETPBM_MAGIC:
        return True
    if path.suffix.lower() in _PILLOW_SUFFIXES:
        try:
            import PIL  # noqa: F401
        except ImportError:
            return False
        return True
    return False


def save_manifest(manifest: DatasetManifest, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path", "label", "provenance"])
        for e in manifest.entries:
            writer.writerow([e.path, e.label, e.provenance])


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    entries: list[ManifestEntry] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["path", "label", "provenance"]:
            raise CorruptFileError(f"{path}: expected manifest header path,label,provenance")
        for row in reader:
            if len(row) != 3:
                raise CorruptFileError(f"{path}: malformed manifest row {row!r}")
            entries.append(ManifestEntry(path=row[0], label=row[1], provenance=row[2]))
    classes = tuple(sorted({e.label for e in entries}))
    return DatasetManifest(classes=classes, entries=entries, root=path.parent)


def augment_rotations(
    manifest: DatasetManifest, step: float = 5.0, count: int = 9, out_dir=None
) -> DatasetManifest:
    """Write ``count`` rotated copies of every entry at step, 2*step, ...

    Returns a manifest of originals plus rotations (len = originals *
    (count + 1)), rooted at ``out_dir``. When that differs from the input
    root the originals are re-encoded there too, so the output tree is
    self-contained.
    """
    if step <= 0 or count < 1:
        raise BadSpecError(f"need a positive step and count, got step={step} count={count}")
    if step * count >= 360:
        raise BadSpecError(f"rotations wrap past a full turn: {step} * {count} >= 360")
    out_root = Path(out_dir) if out_dir is not None else manifest.root
    if out_root is None:
        raise ValueError("manifest has no root directory and no out_dir was given")
    entries: list[ManifestEntry] = []
    for entry in manifest.entries:
        img = load_image(manifest.resolve(entry))
        src = Path(entry.path)
        (out_root / src.parent).mkdir(parents=True, exist_ok=True)
        if out_root != manifest.root:
            save_pgm(img, out_root / src.parent / (src.stem + ".pgm"))
            entries.append(
                ManifestEntry(
                    path=str(src.parent / (src.stem + ".pgm")),
                    label=entry.label,
                    provenance=entry.provenance,
                )
            )
        else:
            entries.append(entry)
        for i in range(1, count + 1):
            angle = step * i
            name = f"{src.stem}_rot{_angle_tag(angle)}.pgm"
            save_pgm(rotate(img, angle), out_root / src.parent / name)
            entries.append(
                ManifestEntry(
                    path=str(src.parent / name),
                    label=entry.label,
                    provenance=f"rotated({angle:g})",
                )
            )
    return DatasetManifest(classes=manifest.classes, entries=entries, root=out_root)


def _angle_tag(angle: float) -> str:
    return f"{angle:g}".replace(".", "p").replace("-", "m")


# ---------------------------------------------------------------------------
# synthetic textures


@dataclass(frozen=True)
class SyntheticSpec:
    """Three texture families with per-image parameter jitter."""

    classes: tuple[str, ...] = ("blobs", "checkerboard", "stripes")
    per_class: int = 20
    size: int = 128
    cell_range: tuple[int, int] = (8, 20)
    wavelength_range: tuple[float, float] = (6.0, 24.0)
    blur_range: tuple[int, int] = (2, 6)
    noise_sigma: tuple[float, float] = (2.0, 8.0)
    seed: int = 0

    def validate(self) -> None:
        known = set(_FAMILIES)
        if not self.classes or not set(self.classes) <= known:
            raise BadSpecError(f"classes must be drawn from {sorted(known)}, got {self.classes}")
        if len(set(self.classes)) != len(self.classes):
            raise BadSpecError("classes must be distinct")
        if self.per_class < 1:
            raise BadSpecError(f"per_class must be >= 1, got {self.per_class}")
        if self.size < 16:
            raise BadSpecError(f"size must be >= 16, got {self.size}")
        for name, (lo, hi) in (
            ("cell_range", self.cell_range),
            ("wavelength_range", self.wavelength_range),
            ("blur_range", self.blur_range),
            ("noise_sigma", self.noise_sigma),
        ):
            if lo <= 0 or hi < lo:
                raise BadSpecError(f"{name} must satisfy 0 < lo <= hi, got ({lo}, {hi})")
        if self.seed < 0:
            raise BadSpecError(f"seed must be non-negative, got {self.seed}")


def _two_tone(rng) -> tuple[int, int]:
    low = int(rng.integers(20, 91))
    high = int(rng.integers(150, 236))
    return low, high


def _checkerboard(rng, size: int, spec: SyntheticSpec) -> np.ndarray:
    cell = int(rng.integers(spec.cell_range[0], spec.cell_range[1] + 1))
    px = int(rng.integers(0, cell))
    py = int(rng.integers(0, cell))
    low, high = _two_tone(rng)
    x = np.arange(size) + px
    y = np.arange(size) + py
    parity = ((x[None, :] // cell) + (y[:, None] // cell)) % 2
    return np.where(parity == 0, low, high).astype(np.float64)


def _stripes(rng, size: int, spec: SyntheticSpec) -> np.ndarray:
    wavelength = rng.uniform(*spec.wavelength_range)
    theta = rng.uniform(0.0, math.pi)
    amplitude = rng.uniform(40.0, 100.0)
    mid = rng.uniform(100.0, 155.0)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    x = np.arange(size, dtype=np.float64)
    proj = math.cos(theta) * x[None, :] + math.sin(theta) * x[:, None]
    return mid + amplitude * np.sin(2.0 * math.pi * proj / wavelength + phase)


def _box_blur(a: np.ndarray, r: int) -> np.ndarray:
    for axis in range(2):
        pad = [(r, r) if ax == axis else (0, 0) for ax in range(2)]
        padded = np.pad(a, pad, mode="edge")
        acc = np.zeros_like(a)
        for off in range(2 * r + 1):
            sl = [slice(None), slice(None)]
            sl[axis] = slice(off, off + a.shape[axis])
            acc += padded[tuple(sl)]
        a = acc / (2 * r + 1)
    return a


def _blobs(rng, size: int, spec: SyntheticSpec) -> np.ndarray:
    radius = int(rng.integers(spec.blur_range[0], spec.blur_range[1] + 1))
    low, high = _two_tone(rng)
    noise = rng.random((size, size))
    smooth = _box_blur(noise, radius)
    return np.where(smooth <= np.median(smooth), low, high).astype(np.float64)


_FAMILIES = {"checkerboard": _checkerboard, "stripes": _stripes, "blobs": _blobs}


def generate_synthetic(spec: SyntheticSpec, out_dir) -> DatasetManifest:
    """Render the spec into PGM files under ``out_dir`` and manifest them.

    Each image draws from a generator seeded with (seed, class index,
    image index), so regenerating with the same spec is bit-identical
    and images are independent of generation order.
    """
    spec.validate()
    out_root = Path(out_dir)
    classes = tuple(sorted(spec.classes))
    entries: list[ManifestEntry] = []
    for class_index, name in enumerate(classes):
        family = _FAMILIES[name]
        (out_root / name).mkdir(parents=True, exist_ok=True)
        for image_index in range(spec.per_class):
            rng = np.random.default_rng(
                np.random.SeedSequence([spec.seed, class_index, image_index])
            )
            base = family(rng, spec.size, spec)
            sigma = rng.uniform(*spec.noise_sigma)
            noisy = base + rng.normal(0.0, sigma, base.shape)
            img = np.clip(np.floor(noisy + 0.5), 0.0, 255.0).astype(np.uint8)
            if img.max() == img.min():
                raise BadSpecError(f"{name} parameters produced a constant image")
            rel = f"{name}/{name}_{image_index:03d}.pgm"
            save_pgm(img, out_root / rel)
            entries.append(ManifestEntry(path=rel, label=name))
    return DatasetManifest(classes=classes, entries=entries, root=out_root)


def extract_entries(
    manifest: DatasetManifest, variant: str, cfg: ExtractionConfig
) -> tuple[list[FeatureVector], list[tuple[str, str]]]:
    """Extract features for every manifest entry.

    Returns the vectors for the images that succeeded plus a list of
    (path, error) pairs for those that did not.
    """
    vectors: list[FeatureVector] = []
    failures: list[tuple[str, str]] = []
    for entry in manifest.entries:
        try:
            img = load_image(manifest.resolve(entry))
            vectors.append(extract(img, variant, cfg, label=entry.label, source=entry.path))
        except (OSError, TexclassError, ValueError) as exc:
            failures.append((entry.path, str(exc)))
    return vectors, failures
