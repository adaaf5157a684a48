"""Pipeline configuration and deterministic seed derivation.

One master seed reproduces an entire run. Stage seeds are derived as
``SeedSequence([master, salt, ...]).generate_state(1, uint64)`` with the
frozen salts below, so generation, splitting and per-cell model training
each consume an independent, reproducible stream:

    generation   [master, 1]           (then [seed, class, image] per image)
    split        [master, 2]
    model        [master, 3, cell]     (then [seed, tree] per forest tree)
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from .features import ExtractionConfig
from .glcm import AGGREGATIONS
from .lbp import MODES

SALT_GENERATE = 1
SALT_SPLIT = 2
SALT_MODEL = 3


def derive_seed(master: int, *salts: int) -> int:
    """Derive a stage seed from the master seed and integer salts."""
    if master < 0:
        raise ValueError(f"seed must be non-negative, got {master}")
    ss = np.random.SeedSequence([master, *salts])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of the extract/train/evaluate pipeline, with defaults.

    Validation happens up front via :meth:`validate`, which names the
    violated constraint, so commands can refuse bad values before any
    work starts.
    """

    resize: int = 128
    levels: int = 8
    distance: int = 1
    aggregation: str = "average"
    lbp_mode: str = "rotation_invariant"
    standardize: bool = True
    k: int = 5
    trees: int = 100
    max_features: int | None = None
    train_fraction: float = 0.9
    stratify: bool = True
    seed: int = 0

    def validate(self) -> None:
        if self.resize < 3:
            raise ValueError(f"resize must be at least 3 (LBP needs an interior), got {self.resize}")
        if not 2 <= self.levels <= 256:
            raise ValueError(f"levels must be in [2, 256], got {self.levels}")
        if self.distance < 1:
            raise ValueError(f"distance must be >= 1, got {self.distance}")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}, got {self.aggregation!r}")
        if self.lbp_mode not in MODES:
            raise ValueError(f"lbp_mode must be one of {MODES}, got {self.lbp_mode!r}")
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"k must be a positive odd number, got {self.k}")
        if self.trees < 1:
            raise ValueError(f"trees must be >= 1, got {self.trees}")
        if self.max_features is not None and self.max_features < 1:
            raise ValueError(f"max-features must be >= 1, got {self.max_features}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train-fraction must be in (0, 1), got {self.train_fraction}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    def extraction(self) -> ExtractionConfig:
        return ExtractionConfig(
            resize=self.resize,
            levels=self.levels,
            distance=self.distance,
            aggregation=self.aggregation,
            lbp_mode=self.lbp_mode,
        )

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_BOOL_STRINGS = {"true": True, "false": False, "yes": True, "no": False, "1": True, "0": False}


def load_config_file(path) -> dict:
    """Parse a ``key = value`` config file into PipelineConfig overrides."""
    known = {f.name: f.type for f in fields(PipelineConfig)}
    overrides: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown configuration key {key!r}")
            overrides[key] = _coerce(key, value)
    return overrides


def _coerce(key: str, value: str):
    default = getattr(PipelineConfig, key)
    if isinstance(default, bool):
        if value.lower() not in _BOOL_STRINGS:
            raise ValueError(f"{key} expects a boolean, got {value!r}")
        return _BOOL_STRINGS[value.lower()]
    if key == "max_features":
        return None if value.lower() in ("none", "auto") else int(value)
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def make_config(file_overrides: dict | None = None, flag_overrides: dict | None = None) -> PipelineConfig:
    """Defaults, overridden by a config file, overridden by explicit flags."""
    cfg = PipelineConfig()
    if file_overrides:
        cfg = replace(cfg, **file_overrides)
    if flag_overrides:
        cfg = replace(cfg, **{k: v for k, v in flag_overrides.items() if v is not None})
    cfg.validate()
    return cfg
