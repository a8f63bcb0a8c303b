"""Small shared helpers: tie-aware ranking, deterministic parallel mapping."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np


def average_ranks(x: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties assigned the mean of their rank positions."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    order = np.argsort(x, kind="mergesort")
    sx = x[order]
    new_group = np.empty(n, dtype=bool)
    new_group[0] = True
    new_group[1:] = sx[1:] != sx[:-1]
    group = np.cumsum(new_group) - 1
    counts = np.bincount(group)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    mean_rank = starts + 0.5 * (counts - 1) + 1.0
    out = np.empty(n)
    out[order] = mean_rank[group]
    return out


def parallel_map(fn: Callable, items: Iterable, threads: int = 1) -> list:
    """Apply ``fn`` to items, results in input order regardless of scheduling."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
