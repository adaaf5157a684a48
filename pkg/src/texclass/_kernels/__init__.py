"""Hot per-pixel kernels with a compiled core and a NumPy fallback.

The compiled extension (``_native``, Cython) is preferred when it imported
cleanly; otherwise the pure-NumPy ``fallback`` module is used. Both produce
bit-identical arrays, so nothing downstream depends on which one is active.
Set ``TEXCLASS_KERNELS=fallback`` (or ``native``) to force a backend, e.g.
for benchmarking; asking for ``native`` when the extension is missing is an
import-time error.
"""

from __future__ import annotations

import os

from . import fallback
from .fallback import NEIGHBOR_OFFSETS

try:
    from . import _native
except ImportError:
    _native = None

_choice = os.environ.get("TEXCLASS_KERNELS", "auto").lower()
if _choice not in ("auto", "native", "fallback"):
    raise ImportError(f"TEXCLASS_KERNELS must be auto, native or fallback, not {_choice!r}")
if _choice == "native" and _native is None:
    raise ImportError("TEXCLASS_KERNELS=native but the compiled extension is not available")

if _choice == "fallback" or _native is None:
    BACKEND = "fallback"
    _impl = fallback
else:
    BACKEND = "native"
    _impl = _native

glcm_counts = _impl.glcm_counts
lbp_code_image = _impl.lbp_code_image
resize_bilinear = _impl.resize_bilinear
rotate_bilinear = _impl.rotate_bilinear

__all__ = [
    "BACKEND",
    "NEIGHBOR_OFFSETS",
    "glcm_counts",
    "lbp_code_image",
    "resize_bilinear",
    "rotate_bilinear",
]
