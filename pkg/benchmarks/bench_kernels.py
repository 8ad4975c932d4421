"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Covers the four hot loops: exact Euclidean distance transform, connected
component labeling, rotated-rectangle overlap scoring (the Powell placement
objective), and polygon rasterization.
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from citykit._kernels import _pyfallback

try:
    from citykit._kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_cases(seed: int = 0):
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 7, size=(768, 768), dtype=np.uint8)
    mask = rng.random((768, 768)) < 0.02
    rect_mask = rng.random((120, 120)) < 0.5
    poly_xs = 380.0 + 300.0 * np.cos(np.linspace(0, 2 * math.pi, 9)[:-1])
    poly_ys = 380.0 + 300.0 * np.sin(np.linspace(0, 2 * math.pi, 9)[:-1])

    def rect_case(backend):
        # ~ one Powell line search worth of objective evaluations
        for i in range(100):
            theta = i * 0.031
            backend.rect_overlap(
                rect_mask, 0, 0, 60.0, 55.0, 28.0, 17.0, math.cos(theta), math.sin(theta)
            )

    def poly_case(backend):
        canvas = np.zeros((768, 768), dtype=np.uint8)
        backend.fill_polygon(canvas, 2, poly_xs, poly_ys)

    return {
        "edt_sq 768^2": lambda backend: backend.edt_sq(mask),
        "label_components 768^2": lambda backend: backend.label_components(labels, 0),
        "rect_overlap x100": rect_case,
        "fill_polygon 768^2": poly_case,
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    cases = make_cases()
    print(f"{'kernel':<26} {'python':>10} {'compiled':>10} {'speedup':>9}")
    for name, fn in cases.items():
        py = timeit(lambda: fn(_pyfallback), args.repeats)
        if _core is None:
            print(f"{name:<26} {py * 1e3:>8.1f}ms {'n/a':>10} {'n/a':>9}")
            continue
        cy = timeit(lambda: fn(_core), args.repeats)
        print(f"{name:<26} {py * 1e3:>8.1f}ms {cy * 1e3:>8.1f}ms {py / cy:>8.1f}x")


if __name__ == "__main__":
    main()
