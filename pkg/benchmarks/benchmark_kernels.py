#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against their pure-numpy fallbacks.

Usage:
    python benchmarks/benchmark_kernels.py

The numpy path is what you get with PHIRL_DISABLE_NUMBA=1 (or without numba
installed); this script imports both implementations directly so a single
process can time them side by side. The first numba call includes JIT
compilation and is excluded via warmup.
"""
import time

import numpy as np

from phirl import _kernels


def timeit(fn, *args, repeats=7, warmup=2):
    for _ in range(warmup):
        fn(*args)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def row(name, t_numpy, t_numba):
    speedup = t_numpy / t_numba if t_numba > 0 else float("inf")
    print(f"{name:<34} {t_numpy * 1e3:>10.2f} ms {t_numba * 1e3:>10.2f} ms {speedup:>7.2f}x")


def main():
    if not _kernels.HAVE_NUMBA:
        print("numba is not importable; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<34} {'numpy':>13} {'numba':>13} {'speedup':>8}")

    # lagged correlation matrix: the emergence pipeline's per-window workhorse
    x_small = rng.normal(size=(100, 64))
    row(
        "lagged_corr 100x64 (window)",
        timeit(_kernels.lagged_corr_numpy, x_small, 1, repeats=50),
        timeit(_kernels.lagged_corr_numba, x_small, 1, repeats=50),
    )
    x_big = rng.normal(size=(100_000, 16))
    row(
        "lagged_corr 100000x16",
        timeit(_kernels.lagged_corr_numpy, x_big, 1),
        timeit(_kernels.lagged_corr_numba, x_big, 1),
    )

    # VAR(1) simulation: inherently sequential, the numba sweet spot
    a = 0.2 * rng.normal(size=(8, 8))
    a /= max(1.0, 1.2 * np.max(np.abs(np.linalg.eigvals(a))))
    eps = rng.normal(size=(1_000_000, 8))
    x0 = rng.normal(size=8)
    row(
        "var1_simulate 1e6 x 8",
        timeit(_kernels.var1_simulate_numpy, a, eps, x0, repeats=3),
        timeit(_kernels.var1_simulate_numba, a, eps, x0, repeats=3),
    )

    # split scan: the forest's inner loop
    xs = rng.normal(size=(200, 16))
    ys = xs[:, 3] * 2.0 + rng.normal(size=200)
    row(
        "best_split 200x16",
        timeit(_kernels.best_split_numpy, xs, ys, 2, repeats=50),
        timeit(_kernels.best_split_numba, xs, ys, 2, repeats=50),
    )


if __name__ == "__main__":
    main()
