#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-NumPy fallback.

Runs every kernel on identical inputs through both backends, verifies
the outputs match bit-for-bit, and reports per-call timings. Usage:

    python benchmarks/bench_kernels.py [--size 512] [--repeats 20]
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from texclass._kernels import fallback

try:
    from texclass._kernels import _native as native
except ImportError:
    native = None


def best_of(fn, args, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=512, help="test image side (default 512)")
    parser.add_argument("--repeats", type=int, default=20, help="timing repeats (default 20)")
    args = parser.parse_args()

    if native is None:
        print("compiled extension not importable; build with: pip install -e . --no-build-isolation",
              file=sys.stderr)
        return 1

    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, (args.size, args.size), dtype=np.uint8)
    quantized = (img.astype(np.int64) * 8 // 256).astype(np.uint8)
    rad = 33.0 * (math.pi / 180.0)
    cases = [
        ("glcm_counts", (quantized, 8, 1, 0)),
        ("lbp_code_image", (img,)),
        ("resize_bilinear", (img, args.size // 2, args.size // 2)),
        ("rotate_bilinear", (img, math.cos(rad), math.sin(rad))),
    ]

    print(f"image {args.size}x{args.size}, best of {args.repeats} runs")
    print(f"{'kernel':<16} {'native':>12} {'fallback':>12} {'speedup':>9}  match")
    for name, call_args in cases:
        n_fn = getattr(native, name)
        f_fn = getattr(fallback, name)
        if not np.array_equal(n_fn(*call_args), f_fn(*call_args)):
            print(f"{name:<16} OUTPUT MISMATCH", file=sys.stderr)
            return 1
        t_native = best_of(n_fn, call_args, args.repeats)
        t_fallback = best_of(f_fn, call_args, args.repeats)
        print(f"{name:<16} {t_native * 1e3:>10.3f}ms {t_fallback * 1e3:>10.3f}ms "
              f"{t_fallback / t_native:>8.1f}x  ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
