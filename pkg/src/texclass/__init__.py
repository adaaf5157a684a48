"""Texture-based 2D object classification.

GLCM and LBP feature extraction over preprocessed grayscale images,
classified with from-scratch KNN, random forest and a soft voting
ensemble, plus a rotation-augmented synthetic dataset and an evaluation
grid. The hot per-pixel kernels run as a compiled extension when
available and fall back to bit-identical NumPy code otherwise; see
``texclass._kernels.BACKEND``.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .classify import (
    EnsembleModel,
    KnnModel,
    RfModel,
    ensemble_predict,
    euclidean,
    knn_fit,
    knn_predict,
    load_model,
    rf_predict,
    rf_train,
    save_model,
)
from .config import PipelineConfig, derive_seed
from .dataset import (
    DatasetManifest,
    SyntheticSpec,
    augment_rotations,
    generate_synthetic,
    ingest,
    load_manifest,
    save_manifest,
)
from .errors import TexclassError
from .evaluation import (
    ConfusionMatrix,
    EvaluationReport,
    SplitSpec,
    confusion,
    metrics,
    run_grid,
    split,
)
from .features import (
    ExtractionConfig,
    FeatureVector,
    Standardizer,
    apply_standardizer,
    extract,
    fit_standardizer,
    load_features,
    save_features,
)
from .glcm import GlcmFeatures, GlcmMatrix, GlcmOffset, compute_glcm, glcm_feature_block
from .imaging import QuantizedImage, decode_image, load_image, quantize, resize, rotate, save_pgm, to_grayscale
from .lbp import LbpConfig, LbpHistogram, lbp_code, lbp_histogram, ri_map

__version__ = "0.1.0"
