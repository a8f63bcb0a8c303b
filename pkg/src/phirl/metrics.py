"""Baseline representation metrics and the 8 trajectory descriptors."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .gaussinfo import gaussian_mi_bivariate, pearson
from .preprocess import ConstantColumnWarning
from .stats import kendall
from .trajdata import LatentTrajectory

METRIC_NAMES = (
    "entropy",
    "mutual_information",
    "autocorrelation",
    "effective_dimension",
    "magnitude",
)

DESCRIPTOR_NAMES = (
    "std",
    "trend",
    "monotonicity",
    "flatness",
    "n_peaks",
    "peak_distance",
    "peak_difference",
    "range",
)


@dataclass(frozen=True)
class MetricVector:
    entropy: float
    mutual_information: float
    autocorrelation: float
    effective_dimension: float
    magnitude: float

    def __post_init__(self):
        if self.effective_dimension < 1.0 - 1e-9:
            raise ValueError("effective_dimension below 1")
        if self.magnitude < 0.0:
            raise ValueError("magnitude below 0")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES}


@dataclass(frozen=True)
class DescriptorVector:
    std: float
    trend: float
    monotonicity: float
    flatness: float
    n_peaks: int
    peak_distance: float
    peak_difference: float
    range: float

    def __post_init__(self):
        if self.n_peaks == 0 and (
            self.peak_distance != 0.0 or self.peak_difference != 0.0 or self.range != 0.0
        ):
            raise ValueError("peak statistics must be 0 when there are no peaks")

    def as_array(self) -> np.ndarray:
        return np.array([float(getattr(self, name)) for name in DESCRIPTOR_NAMES])

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in DESCRIPTOR_NAMES}


def baseline_metrics(traj: LatentTrajectory) -> MetricVector:
    """Five standard representation summaries of a preprocessed trajectory.

    entropy: mean per-unit Gaussian differential entropy 0.5 ln(2 pi e s^2);
    mutual_information: mean pairwise lag-0 Gaussian MI; autocorrelation:
    mean per-unit lag-1 Pearson; effective_dimension: participation ratio of
    the covariance spectrum; magnitude: mean Euclidean norm of the rows.
    Constant units are excluded from the means and flagged.
    """
    if traj.T < 3:
        raise ValueError(f"baseline_metrics needs T >= 3, got T={traj.T}")
    v = traj.values
    live = [j for j in range(traj.n) if not np.all(v[:, j] == v[0, j])]
    if not live:
        raise ValueError("all units are constant")
    if len(live) < traj.n:
        dead = sorted(set(range(traj.n)) - set(live))
        warnings.warn(
            f"baseline_metrics: episode {traj.episode_id!r}: constant unit(s) "
            f"[{', '.join(str(u) for u in dead)}] excluded from means",
            ConstantColumnWarning,
            stacklevel=2,
        )
    entropy = float(
        np.mean([0.5 * math.log(2.0 * math.pi * math.e * v[:, j].var(ddof=1)) for j in live])
    )
    pair_mis = [
        gaussian_mi_bivariate(pearson(v[:, live[i]], v[:, live[j]]))
        for i in range(len(live))
        for j in range(i + 1, len(live))
    ]
    mutual_information = float(np.mean(pair_mis)) if pair_mis else 0.0
    # lag-1 autocorrelation with the 0-if-degenerate-slice convention
    lagged = _kernels.lagged_corr(np.ascontiguousarray(v[:, live]), 1)
    autocorrelation = float(np.mean(np.diag(lagged)))
    evals = np.linalg.eigvalsh(np.cov(v.T, ddof=1))
    evals = np.clip(evals, 0.0, None)
    effective_dimension = float(evals.sum() ** 2 / np.sum(evals**2))
    magnitude = float(np.mean(np.linalg.norm(v, axis=1)))
    return MetricVector(
        entropy, mutual_information, autocorrelation, effective_dimension, magnitude
    )


def _peaks(s: np.ndarray):
    """Interior indices that are strict local maxima or minima."""
    left = s[1:-1]
    maxima = (left > s[:-2]) & (left > s[2:])
    minima = (left < s[:-2]) & (left < s[2:])
    return np.flatnonzero(maxima | minima) + 1


def descriptors(series, interval: int = 100) -> DescriptorVector:
    """The 8 scalar summaries of a 1-D trajectory."""
    s = np.asarray(series, dtype=np.float64).ravel()
    length = s.size
    if length < 3:
        raise ValueError(f"descriptors need length >= 3, got {length}")
    if interval < 1:
        raise ValueError("interval must be >= 1")
    t = np.arange(length, dtype=np.float64)
    std = float(s.std(ddof=1))
    if np.all(s == s[0]):
        trend = 0.0
        monotonicity = 0.0
    else:
        tc = t - t.mean()
        trend = float(tc @ (s - s.mean()) / (tc @ tc))
        monotonicity = float(kendall(s, t))
    flatness = _flatness(s, interval)
    peaks = _peaks(s)
    n_peaks = int(peaks.size)
    if n_peaks >= 2:
        peak_distance = float(np.mean(np.diff(peaks)))
        peak_difference = float(np.mean(np.abs(np.diff(s[peaks]))))
        peak_range = float(s[peaks].max() - s[peaks].min())
    else:
        peak_distance = peak_difference = peak_range = 0.0
    return DescriptorVector(
        std, trend, monotonicity, flatness, n_peaks, peak_distance, peak_difference, peak_range
    )


def _flatness(s: np.ndarray, interval: int) -> float:
    """R-squared of the piecewise-interval-mean approximation; 0 for a single
    interval or a constant series."""
    length = s.size
    n_chunks = math.ceil(length / interval)
    if n_chunks < 2:
        return 0.0
    ss_tot = float(np.sum((s - s.mean()) ** 2))
    if ss_tot == 0.0:
        return 0.0
    model = np.empty(length)
    for k in range(n_chunks):
        chunk = slice(k * interval, min((k + 1) * interval, length))
        model[chunk] = s[chunk].mean()
    ss_res = float(np.sum((s - model) ** 2))
    return 1.0 - ss_res / ss_tot
