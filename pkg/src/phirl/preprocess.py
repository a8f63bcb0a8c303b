"""Copula Gaussianization and standardization of latent trajectories.

The pipeline order is rank-normalize first, z-score second; both operate per
column, independently per episode. Constant columns are mapped to zeros and
flagged with a ConstantColumnWarning.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ._util import average_ranks
from .stats import dagostino_k2
from .trajdata import LatentTrajectory


class ConstantColumnWarning(UserWarning):
    """A unit with all-equal values was mapped to zeros."""


def _warn_constant(op: str, episode_id: str, units) -> None:
    units = ", ".join(str(u) for u in units)
    warnings.warn(
        f"{op}: episode {episode_id!r}: constant unit(s) [{units}] mapped to zeros",
        ConstantColumnWarning,
        stacklevel=3,
    )


def rank_normalize(traj: LatentTrajectory) -> LatentTrajectory:
    """Map each column to standard normal quantiles of its (average) ranks,
    u = (rank - 0.5) / T."""
    v = traj.values
    t = traj.T
    out = np.empty_like(v)
    constant = []
    for j in range(traj.n):
        col = v[:, j]
        if np.all(col == col[0]):
            out[:, j] = 0.0
            constant.append(j)
            continue
        out[:, j] = ndtri((average_ranks(col) - 0.5) / t)
    if constant:
        _warn_constant("rank_normalize", traj.episode_id, constant)
    return LatentTrajectory(out, episode_id=traj.episode_id)


def zscore(traj: LatentTrajectory) -> LatentTrajectory:
    """Center each column and scale to unit sample standard deviation
    (denominator T - 1)."""
    v = traj.values
    out = np.empty_like(v)
    constant = []
    for j in range(traj.n):
        col = v[:, j]
        if np.all(col == col[0]):
            out[:, j] = 0.0
            constant.append(j)
            continue
        out[:, j] = (col - col.mean()) / col.std(ddof=1)
    if constant:
        _warn_constant("zscore", traj.episode_id, constant)
    return LatentTrajectory(out, episode_id=traj.episode_id)


def preprocess(traj: LatentTrajectory) -> LatentTrajectory:
    """Full preprocessing: rank_normalize then zscore."""
    return zscore(rank_normalize(traj))


@dataclass(frozen=True)
class PreprocessReport:
    n_units: int
    fraction_rejecting: float
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.fraction_rejecting <= 1.0:
            raise ValueError("fraction_rejecting outside [0, 1]")


def normality_fraction(traj: LatentTrajectory, alpha: float = 0.05) -> PreprocessReport:
    """Share of units whose D'Agostino K^2 test rejects normality at alpha."""
    if traj.T < 20:
        raise ValueError(
            f"normality_fraction needs T >= 20 for test validity, got T={traj.T}"
        )
    rejecting = 0
    for j in range(traj.n):
        col = traj.values[:, j]
        if np.all(col == col[0]):
            # a constant unit is degenerate, not non-normal; it never rejects
            continue
        if dagostino_k2(col).p_value < alpha:
            rejecting += 1
    return PreprocessReport(traj.n, rejecting / traj.n, alpha)
