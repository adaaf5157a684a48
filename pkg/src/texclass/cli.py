"""Command-line interface: generate, extract, train, evaluate, predict.

Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
Flags override values from an optional ``key = value`` config file,
which overrides the built-in defaults; every run is reproducible from
its arguments because all randomness derives from the master ``--seed``.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import classify, config, dataset, evaluation, features
from .errors import InsufficientDataError, TexclassError
from .features import ExtractionConfig, Standardizer
from .imaging import load_image

_LBP_MODE_FLAG = {"raw": "raw", "ri": "rotation_invariant"}


def _add_config_flags(p: argparse.ArgumentParser, *names: str) -> None:
    flags = {
        "levels": lambda: p.add_argument("--levels", type=int, help="gray levels for the GLCM (default 8)"),
        "distance": lambda: p.add_argument("--distance", type=int, help="GLCM pixel displacement (default 1)"),
        "aggregation": lambda: p.add_argument(
            "--aggregation", choices=("average", "concatenate"),
            help="combine GLCM angles by averaging (5 values) or concatenation (20)",
        ),
        "lbp-mode": lambda: p.add_argument(
            "--lbp-mode", choices=("raw", "ri"), dest="lbp_mode",
            help="raw 256-bin or rotation-invariant 36-bin LBP histogram",
        ),
        "k": lambda: p.add_argument("--k", type=int, help="KNN neighbor count, odd (default 5)"),
        "trees": lambda: p.add_argument("--trees", type=int, help="forest size (default 100)"),
        "max-features": lambda: p.add_argument(
            "--max-features", type=int, dest="max_features",
            help="features tried per split (default round(sqrt(dim)))",
        ),
        "train-fraction": lambda: p.add_argument(
            "--train-fraction", type=float, dest="train_fraction",
            help="training share of the split (default 0.9)",
        ),
        "no-stratify": lambda: p.add_argument(
            "--no-stratify", action="store_const", const=False, dest="stratify",
            help="split without per-class stratification",
        ),
        "no-standardize": lambda: p.add_argument(
            "--no-standardize", action="store_const", const=False, dest="standardize",
            help="skip z-score feature standardization",
        ),
        "seed": lambda: p.add_argument("--seed", type=int, help="master seed (default 0)"),
        "config": lambda: p.add_argument("--config", help="key = value config file"),
    }
    for name in names:
        flags[name]()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="texclass",
        description="Texture-based 2D object classification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="render a synthetic rotation-augmented dataset")
    p.add_argument("--out", required=True, help="dataset output directory")
    p.add_argument("--per-class", type=int, default=20, dest="per_class",
                   help="base images per class before rotation (default 20)")
    p.add_argument("--size", type=int, default=128, help="square image side (default 128)")
    p.add_argument("--step", type=float, default=5.0, help="rotation step in degrees (default 5)")
    p.add_argument("--rotations", type=int, default=9, help="rotated copies per image (default 9)")
    _add_config_flags(p, "seed", "config")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("extract", help="extract feature vectors from a dataset directory")
    p.add_argument("--dataset", required=True, help="dataset root (one subdirectory per class)")
    p.add_argument("--out", required=True, help="output feature CSV path")
    p.add_argument("--variant", choices=("glcm", "lbp", "combined", "all"), default="combined")
    _add_config_flags(p, "levels", "distance", "aggregation", "lbp-mode", "config")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("train", help="fit models from a feature CSV")
    p.add_argument("--features", required=True, help="feature CSV from the extract command")
    p.add_argument("--out", required=True, help="output directory for model files")
    p.add_argument("--model", choices=("knn", "rf", "ensemble", "all"), default="all")
    _add_config_flags(p, "levels", "distance", "k", "trees", "max-features",
                      "no-standardize", "seed", "config")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="run the 7-cell variant x classifier grid")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--dataset", help="dataset root to extract and evaluate")
    src.add_argument("--features", help="precomputed combined-variant feature CSV")
    p.add_argument("--out", required=True, help="report output directory")
    _add_config_flags(p, "levels", "distance", "aggregation", "lbp-mode", "k", "trees",
                      "max-features", "train-fraction", "no-stratify", "no-standardize",
                      "seed", "config")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("predict", help="classify images with a trained model")
    p.add_argument("--model", required=True, help="model JSON written by the train command")
    p.add_argument("--dataset", help="predict every image in a dataset directory")
    p.add_argument("images", nargs="*", help="image files to classify")
    p.set_defaults(func=_cmd_predict)

    return parser


def _effective_config(args) -> config.PipelineConfig:
    file_overrides = config.load_config_file(args.config) if getattr(args, "config", None) else None
    flag_overrides = {}
    for key in ("levels", "distance", "aggregation", "k", "trees", "max_features",
                "train_fraction", "stratify", "standardize", "seed"):
        if hasattr(args, key):
            flag_overrides[key] = getattr(args, key)
    if getattr(args, "lbp_mode", None) is not None:
        flag_overrides["lbp_mode"] = _LBP_MODE_FLAG[args.lbp_mode]
    return config.make_config(file_overrides, flag_overrides)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _effective_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args, cfg)
    except (TexclassError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _cmd_generate(args, cfg: config.PipelineConfig) -> int:
    spec = dataset.SyntheticSpec(
        per_class=args.per_class,
        size=args.size,
        seed=config.derive_seed(cfg.seed, config.SALT_GENERATE),
    )
    try:
        spec.validate()
        if args.step <= 0 or args.rotations < 1 or args.step * args.rotations >= 360:
            raise ValueError(
                f"rotation step {args.step} x {args.rotations} must stay under 360 degrees"
            )
    except (TexclassError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    manifest = dataset.generate_synthetic(spec, out)
    manifest = dataset.augment_rotations(manifest, args.step, args.rotations, out)
    dataset.save_manifest(manifest, out / "manifest.csv")
    print(f"wrote {len(manifest.entries)} images in {len(manifest.classes)} classes to {out}")
    for cls in manifest.classes:
        n = sum(1 for e in manifest.entries if e.label == cls)
        print(f"  {cls}: {n}")
    return 0


def _cmd_extract(args, cfg: config.PipelineConfig) -> int:
    manifest = dataset.ingest(args.dataset)
    if manifest.skipped:
        print(f"skipped {manifest.skipped} non-image file(s)", file=sys.stderr)
    variants = ("glcm", "lbp", "combined") if args.variant == "all" else (args.variant,)
    out = Path(args.out)
    failed = 0
    for variant in variants:
        vectors, failures = dataset.extract_entries(manifest, variant, cfg.extraction())
        for path, message in failures:
            print(f"failed: {path}: {message}", file=sys.stderr)
        failed += len(failures)
        target = out if len(variants) == 1 else out.with_name(f"{out.stem}_{variant}{out.suffix}")
        features.save_features(vectors, target)
        print(f"{variant}: wrote {len(vectors)} vectors of length "
              f"{features.vector_length(variant, cfg.extraction())} to {target}")
    if failed:
        print(f"{failed} image(s) failed extraction", file=sys.stderr)
        return 1
    return 0


def _pipeline_meta(layout, cfg: config.PipelineConfig, scaler: Standardizer | None) -> dict:
    variant, aggregation, lbp_mode = layout
    return {
        "variant": variant,
        "aggregation": aggregation,
        "lbp_mode": lbp_mode,
        "levels": cfg.levels,
        "distance": cfg.distance,
        "resize": cfg.resize,
        "standardize": scaler is not None,
        "standardizer": None if scaler is None else {
            "mean": [float(x) for x in scaler.mean],
            "std": [float(x) for x in scaler.std],
        },
    }


def _cmd_train(args, cfg: config.PipelineConfig) -> int:
    vectors = features.load_features(args.features)
    if not vectors:
        print("error: feature CSV contains no vectors", file=sys.stderr)
        return 2
    layout = features.infer_layout(vectors[0].values.shape[0])
    if layout is None:
        print(f"error: cannot infer a variant from vectors of length "
              f"{vectors[0].values.shape[0]}", file=sys.stderr)
        return 2
    classes = tuple(sorted({v.label for v in vectors}))
    labels = [v.label for v in vectors]
    try:
        scaler = features.fit_standardizer(vectors) if cfg.standardize else None
    except TexclassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    x = np.stack([v.values for v in vectors])
    if scaler is not None:
        x = scaler.transform(x)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = _pipeline_meta(layout, cfg, scaler)
    if scaler is not None:
        features.save_standardizer(scaler, out / "standardizer.json")
        print(f"wrote {out / 'standardizer.json'}")
    wanted = ("knn", "rf", "ensemble") if args.model == "all" else (args.model,)
    try:
        for kind in wanted:
            if kind == "knn":
                model = classify.knn_fit(x, labels, k=cfg.k, classes=classes)
            elif kind == "rf":
                model = classify.rf_train(
                    x, labels, n_trees=cfg.trees, max_features=cfg.max_features,
                    seed=config.derive_seed(cfg.seed, config.SALT_MODEL, 1), classes=classes,
                )
            else:
                model = classify.EnsembleModel(
                    knn=classify.knn_fit(x, labels, k=cfg.k, classes=classes),
                    rf=classify.rf_train(
                        x, labels, n_trees=cfg.trees, max_features=cfg.max_features,
                        seed=config.derive_seed(cfg.seed, config.SALT_MODEL, 2), classes=classes,
                    ),
                )
            model.pipeline = meta
            path = out / f"model_{kind}.json"
            classify.save_model(model, path)
            print(f"wrote {path}")
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _cmd_evaluate(args, cfg: config.PipelineConfig) -> int:
    if args.features:
        vectors = features.load_features(args.features)
        if not vectors:
            print("error: feature CSV contains no vectors", file=sys.stderr)
            return 2
        layout = features.infer_layout(vectors[0].values.shape[0])
        if layout is None or layout[0] != "combined":
            print("error: evaluate needs combined-variant features", file=sys.stderr)
            return 2
        cfg = replace(cfg, aggregation=layout[1], lbp_mode=layout[2])
        classes = tuple(sorted({v.label for v in vectors}))
        cells = evaluation.grid_on_features(vectors, classes, cfg)
    else:
        manifest = dataset.ingest(args.dataset)
        cells = evaluation.run_grid(manifest, cfg)
    evaluation.write_grid_reports(cells, cfg, args.out)
    print(evaluation.render_table(cells), end="")
    failed = [c for c in cells if c.report is None]
    for cell in failed:
        print(f"cell {cell.name} failed: {cell.error}", file=sys.stderr)
    return 1 if failed else 0


def _cmd_predict(args, cfg: config.PipelineConfig | None = None) -> int:
    model = classify.load_model(args.model)
    meta = model.pipeline
    if not meta:
        print("error: model file carries no pipeline metadata; retrain with the "
              "train command", file=sys.stderr)
        return 1
    ext = ExtractionConfig(
        resize=meta["resize"], levels=meta["levels"], distance=meta["distance"],
        aggregation=meta["aggregation"], lbp_mode=meta["lbp_mode"],
    )
    scaler = None
    if meta.get("standardizer"):
        scaler = Standardizer(
            mean=np.array(meta["standardizer"]["mean"], dtype=np.float64),
            std=np.array(meta["standardizer"]["std"], dtype=np.float64),
        )
    paths: list[str] = list(args.images)
    if args.dataset:
        manifest = dataset.ingest(args.dataset)
        paths.extend(str(manifest.resolve(e)) for e in manifest.entries)
    if not paths:
        print("error: no images given; pass files or --dataset", file=sys.stderr)
        return 2
    failed = 0
    for path in paths:
        try:
            img = load_image(path)
            vec = features.extract(img, meta["variant"], ext)
            values = scaler.transform(vec.values) if scaler is not None else vec.values
            label, scores = classify.predict(model, values)
        except (TexclassError, OSError, ValueError) as exc:
            print(f"{path},ERROR,{exc}")
            failed += 1
            continue
        print(",".join([path, label] + [repr(float(s)) for s in scores]))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
