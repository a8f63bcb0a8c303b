"""Hot numerical kernels, with numba-compiled and pure-numpy implementations.

Three inner loops dominate runtime across the toolkit: the lagged pairwise
correlation matrix, VAR(1) trajectory simulation, and the regression-tree
split scan. Each exists twice with the same contract:

* ``*_numba`` — explicit-loop versions compiled with ``@njit``;
* ``*_numpy`` — vectorised fallbacks with no compilation step.

The active implementation is chosen once at import time: numba is used when
it imports cleanly and the environment variable ``PHIRL_DISABLE_NUMBA`` is
not set to a truthy value ("1", "true", "yes"). ``benchmarks/
benchmark_kernels.py`` times both paths side by side.
"""
from __future__ import annotations

import os

import numpy as np


def _numba_disabled() -> bool:
    return os.environ.get("PHIRL_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}


try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on numba-less installs
    njit = None
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# Lagged pairwise correlation matrix
# ---------------------------------------------------------------------------

def lagged_corr_numpy(x: np.ndarray, lag: int = 1) -> np.ndarray:
    """Correlation matrix r[i, j] = pearson(x[:-lag, i], x[lag:, j]).

    Entries where either slice is constant are 0. ``x`` is (T, n) float64
    with T - lag >= 2.
    """
    a = x[:-lag]
    b = x[lag:]
    am = a - a.mean(axis=0)
    bm = b - b.mean(axis=0)
    sa = np.sqrt((am * am).sum(axis=0))
    sb = np.sqrt((bm * bm).sum(axis=0))
    cross = am.T @ bm
    denom = np.outer(sa, sb)
    r = np.zeros_like(cross)
    ok = denom > 0.0
    r[ok] = cross[ok] / denom[ok]
    np.clip(r, -1.0, 1.0, out=r)
    return r


def _lagged_corr_loops(x, lag):
    # centering/scaling in explicit loops, cross products through np.dot so
    # the compiled path keeps the BLAS matmul the numpy path enjoys
    m = x.shape[0] - lag
    n = x.shape[1]
    am = np.empty((n, m))
    bm = np.empty((m, n))
    sa = np.empty(n)
    sb = np.empty(n)
    for j in range(n):
        ma = 0.0
        mb = 0.0
        for t in range(m):
            ma += x[t, j]
            mb += x[t + lag, j]
        ma /= m
        mb /= m
        va = 0.0
        vb = 0.0
        for t in range(m):
            da = x[t, j] - ma
            db = x[t + lag, j] - mb
            am[j, t] = da
            bm[t, j] = db
            va += da * da
            vb += db * db
        sa[j] = np.sqrt(va)
        sb[j] = np.sqrt(vb)
    cross = np.dot(am, bm)
    r = np.zeros((n, n))
    for i in range(n):
        if sa[i] <= 0.0:
            continue
        for j in range(n):
            if sb[j] <= 0.0:
                continue
            v = cross[i, j] / (sa[i] * sb[j])
            if v > 1.0:
                v = 1.0
            elif v < -1.0:
                v = -1.0
            r[i, j] = v
    return r


# ---------------------------------------------------------------------------
# VAR(1) simulation
# ---------------------------------------------------------------------------

def var1_simulate_numpy(a: np.ndarray, eps: np.ndarray, x0: np.ndarray) -> np.ndarray:
    """Iterate x[t+1] = a @ x[t] + eps[t] from x[0] = x0.

    ``eps`` is (T-1, n) pre-scaled innovations; returns (T, n).
    """
    steps = eps.shape[0]
    out = np.empty((steps + 1, x0.shape[0]))
    out[0] = x0
    for t in range(steps):
        out[t + 1] = a @ out[t] + eps[t]
    return out


def _var1_simulate_loops(a, eps, x0):
    steps = eps.shape[0]
    n = x0.shape[0]
    out = np.empty((steps + 1, n))
    for i in range(n):
        out[0, i] = x0[i]
    for t in range(steps):
        for i in range(n):
            s = 0.0
            for j in range(n):
                s += a[i, j] * out[t, j]
            out[t + 1, i] = s + eps[t, i]
    return out


# ---------------------------------------------------------------------------
# Regression-tree split scan
# ---------------------------------------------------------------------------

def best_split_numpy(x: np.ndarray, y: np.ndarray, min_leaf: int):
    """Best MSE split over the columns of ``x``.

    Returns (column index, threshold, total SSE of the two children);
    column index is -1 when no valid split exists. A split position is
    valid only between distinct consecutive sorted values with at least
    ``min_leaf`` samples on each side.
    """
    m, d = x.shape
    best_j = -1
    best_thresh = 0.0
    best_sse = np.inf
    if m < 2 * min_leaf:
        return best_j, best_thresh, best_sse
    for j in range(d):
        order = np.argsort(x[:, j], kind="mergesort")
        xs = x[order, j]
        ys = y[order]
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        total_sum = csum[-1]
        total_sq = csq[-1]
        for s in range(min_leaf, m - min_leaf + 1):
            if xs[s - 1] >= xs[s]:
                continue
            ls = csum[s - 1]
            lq = csq[s - 1]
            sse = (lq - ls * ls / s) + ((total_sq - lq) - (total_sum - ls) ** 2 / (m - s))
            if sse < best_sse:
                best_sse = sse
                best_j = j
                best_thresh = 0.5 * (xs[s - 1] + xs[s])
    return best_j, best_thresh, best_sse


def _best_split_loops(x, y, min_leaf):
    m, d = x.shape
    best_j = -1
    best_thresh = 0.0
    best_sse = np.inf
    if m < 2 * min_leaf:
        return best_j, best_thresh, best_sse
    for j in range(d):
        order = np.argsort(x[:, j], kind="mergesort")
        xs = x[:, j][order]
        ys = y[order]
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        total_sum = csum[m - 1]
        total_sq = csq[m - 1]
        for s in range(min_leaf, m - min_leaf + 1):
            if xs[s - 1] >= xs[s]:
                continue
            ls = csum[s - 1]
            lq = csq[s - 1]
            sse = (lq - ls * ls / s) + ((total_sq - lq) - (total_sum - ls) ** 2 / (m - s))
            if sse < best_sse:
                best_sse = sse
                best_j = j
                best_thresh = 0.5 * (xs[s - 1] + xs[s])
    return best_j, best_thresh, best_sse


if HAVE_NUMBA:
    lagged_corr_numba = njit(cache=True)(_lagged_corr_loops)
    var1_simulate_numba = njit(cache=True)(_var1_simulate_loops)
    best_split_numba = njit(cache=True)(_best_split_loops)
else:  # pragma: no cover
    lagged_corr_numba = None
    var1_simulate_numba = None
    best_split_numba = None

USE_NUMBA = HAVE_NUMBA and not _numba_disabled()
BACKEND = "numba" if USE_NUMBA else "numpy"

if USE_NUMBA:
    lagged_corr = lagged_corr_numba
    var1_simulate = var1_simulate_numba
    best_split = best_split_numba
else:
    lagged_corr = lagged_corr_numpy
    var1_simulate = var1_simulate_numpy
    best_split = best_split_numpy
