"""Seeded random-forest regressor built on the shared split-scan kernel.

Hyperparameters are frozen where the prediction harness uses them: 200
trees, unlimited depth, minimum leaf size 2, per-split feature subsample of
ceil(d / 3), bootstrap resampling. Tree seeds derive from (base seed tuple,
tree index), so fitting is bit-deterministic for identical inputs.
"""
from __future__ import annotations

import math

import numpy as np

from . import _kernels

N_TREES = 200
MIN_LEAF = 2


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, value=None, feature=-1, threshold=0.0, left=None, right=None):
        self.value = value
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right


def _fit_tree(x: np.ndarray, y: np.ndarray, rng, max_features: int) -> _Node:
    if y.size < 2 * MIN_LEAF or np.all(y == y[0]):
        return _Node(value=float(y.mean()))
    d = x.shape[1]
    cand = np.sort(rng.choice(d, size=max_features, replace=False))
    j_local, thresh, _ = _kernels.best_split(
        np.ascontiguousarray(x[:, cand]), np.ascontiguousarray(y), MIN_LEAF
    )
    if j_local < 0:
        return _Node(value=float(y.mean()))
    feature = int(cand[j_local])
    mask = x[:, feature] <= thresh
    left = _fit_tree(x[mask], y[mask], rng, max_features)
    right = _fit_tree(x[~mask], y[~mask], rng, max_features)
    return _Node(feature=feature, threshold=thresh, left=left, right=right)


def _predict_tree(node: _Node, row: np.ndarray) -> float:
    while node.value is None:
        node = node.left if row[node.feature] <= node.threshold else node.right
    return node.value


class RandomForest:
    """Bootstrap ensemble of MSE regression trees."""

    def __init__(self, n_trees: int = N_TREES, seed=0):
        self.n_trees = n_trees
        self.seed = seed if isinstance(seed, tuple) else (seed,)
        self._trees: list[_Node] = []

    def fit(self, x, y) -> "RandomForest":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.size:
            raise ValueError("fit needs an (n, d) matrix and a length-n target")
        n, d = x.shape
        max_features = max(1, math.ceil(d / 3))
        self._trees = []
        for t in range(self.n_trees):
            rng = np.random.default_rng(self.seed + (t,))
            boot = rng.integers(0, n, size=n)
            self._trees.append(_fit_tree(x[boot], y[boot], rng, max_features))
        return self

    def predict(self, x) -> np.ndarray:
        if not self._trees:
            raise RuntimeError("predict called before fit")
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros(x.shape[0])
        for tree in self._trees:
            for i in range(x.shape[0]):
                out[i] += _predict_tree(tree, x[i])
        return out / len(self._trees)


class LinearModel:
    """Ordinary least squares with intercept (minimum-norm solution)."""

    def __init__(self):
        self._beta = None

    def fit(self, x, y) -> "LinearModel":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        design = np.column_stack([np.ones(x.shape[0]), x])
        self._beta, *_ = np.linalg.lstsq(design, y, rcond=None)
        return self

    def predict(self, x) -> np.ndarray:
        if self._beta is None:
            raise RuntimeError("predict called before fit")
        x = np.asarray(x, dtype=np.float64)
        return np.column_stack([np.ones(x.shape[0]), x]) @ self._beta
