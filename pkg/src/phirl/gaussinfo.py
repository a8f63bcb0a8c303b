"""Closed-form Gaussian information measures.

All quantities are in nats. The bivariate closed form is
I(X, Y) = -0.5 ln(1 - rho^2); block mutual information is
I(A, B) = 0.5 ln(det(S_AA) det(S_BB) / det(S)) on the ridged covariance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .trajdata import LatentTrajectory

RHO_SQ_MAX = 1.0 - 1e-12
COV_RIDGE = 1e-8
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class MIMatrix:
    """n x n matrix of lagged pairwise mutual informations; entry (i, j) is
    I(X_i(t); X_j(t+lag))."""

    values: np.ndarray
    lag: int = 1

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("MIMatrix must be square")
        if not np.all(np.isfinite(v)):
            raise ValueError("MIMatrix has non-finite entries")
        if np.any(v < 0.0):
            raise ValueError("MIMatrix has negative entries")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def pearson(x, y) -> float:
    """Sample Pearson correlation in [-1, 1]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two equal-length 1-D sequences")
    if x.size < 2:
        raise ValueError("pearson needs length >= 2")
    for name, v in (("x", x), ("y", y)):
        if np.all(v == v[0]):
            raise ValueError(f"pearson: sequence {name} is constant")
    xc = x - x.mean()
    yc = y - y.mean()
    r = float(xc @ yc / math.sqrt((xc @ xc) * (yc @ yc)))
    return max(-1.0, min(1.0, r))


def gaussian_mi_bivariate(rho: float) -> float:
    """I = -0.5 ln(1 - rho^2), with rho^2 clipped below 1 - 1e-12."""
    if abs(rho) > 1.0:
        raise ValueError(f"|rho| must be <= 1, got {rho}")
    r2 = min(rho * rho, RHO_SQ_MAX)
    return -0.5 * math.log1p(-r2)


def gaussian_mi_blocks(cov: np.ndarray, p: int, ridge: float = COV_RIDGE) -> float:
    """Block MI between the first p variables and the rest."""
    cov = np.asarray(cov, dtype=np.float64)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("covariance must be square")
    n = cov.shape[0]
    if not 1 <= p <= n - 1:
        raise ValueError(f"need 1 <= p <= {n - 1}, got p={p}")
    if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL:
        raise ValueError("covariance is not symmetric (tolerance 1e-10)")
    c = cov + ridge * np.eye(n)
    sign_a, logdet_a = np.linalg.slogdet(c[:p, :p])
    sign_b, logdet_b = np.linalg.slogdet(c[p:, p:])
    sign_f, logdet_f = np.linalg.slogdet(c)
    if sign_a <= 0 or sign_b <= 0 or sign_f <= 0:
        raise ValueError("covariance is not positive definite after ridging")
    return 0.5 * (logdet_a + logdet_b - logdet_f)


def lag1_mi_matrix(traj: LatentTrajectory, lag: int = 1) -> MIMatrix:
    """Pairwise lagged Gaussian MI matrix of a preprocessed trajectory.

    Entry (i, j) is gaussian_mi_bivariate(pearson(x_i[:-lag], x_j[lag:]));
    pairs involving a constant slice are 0.
    """
    if lag < 1:
        raise ValueError("lag must be >= 1")
    if traj.T < lag + 2:
        raise ValueError(f"lag-{lag} MI matrix needs T >= {lag + 2}, got T={traj.T}")
    r = _kernels.lagged_corr(np.ascontiguousarray(traj.values), lag)
    r2 = np.minimum(r * r, RHO_SQ_MAX)
    return MIMatrix(-0.5 * np.log1p(-r2), lag=lag)
