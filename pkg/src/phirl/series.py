"""Run-level series construction shared by the screen, alignment and
prediction pipelines.

Per checkpoint two kinds of emergence series exist:

* the scalar series: median across episodes of the per-episode windowed
  emergence medians (one number per checkpoint);
* the median window trajectory: pointwise median across the checkpoint's
  episodes of the windowed series, truncated to the shortest episode's
  window count (one 1-D series per checkpoint, used for descriptor points).

Baseline metric series are medians across episodes of the per-episode
metric values, computed on preprocessed episodes.
"""
from __future__ import annotations

import numpy as np

from ._util import parallel_map
from .metrics import DESCRIPTOR_NAMES, METRIC_NAMES, baseline_metrics, descriptors
from .phiid import emergence_trajectory
from .preprocess import preprocess
from .trajdata import RunRecord, median_exact


def episode_emergence(run: RunRecord, window: int = 100, stride: int = 10, threads: int = 1):
    """Per-checkpoint list of per-episode EmergenceTrajectory objects."""
    episodes = [(k, ep) for k, cp in enumerate(run.checkpoints) for ep in cp.episodes]
    results = parallel_map(
        lambda item: emergence_trajectory(item[1], window=window, stride=stride),
        episodes,
        threads=threads,
    )
    per_checkpoint = [[] for _ in run.checkpoints]
    for (k, _), emt in zip(episodes, results):
        per_checkpoint[k].append(emt)
    return per_checkpoint


def emergence_scalar_series(per_checkpoint) -> np.ndarray:
    """Median across episodes of the per-episode emergence medians."""
    return np.array([median_exact([emt.median for emt in eps]) for eps in per_checkpoint])


def checkpoint_median_trajectories(per_checkpoint):
    """Pointwise median across episodes, truncated to the shortest series."""
    out = []
    for eps in per_checkpoint:
        shortest = min(len(emt.values) for emt in eps)
        stacked = np.array([emt.values[:shortest] for emt in eps])
        out.append(np.median(stacked, axis=0))
    return out


def baseline_series(run: RunRecord, threads: int = 1) -> dict:
    """Per-metric checkpoint series: median across episodes of each metric."""
    episodes = [(k, ep) for k, cp in enumerate(run.checkpoints) for ep in cp.episodes]
    vectors = parallel_map(
        lambda item: baseline_metrics(preprocess(item[1].latents)), episodes, threads=threads
    )
    per_checkpoint = [[] for _ in run.checkpoints]
    for (k, _), vec in zip(episodes, vectors):
        per_checkpoint[k].append(vec)
    return {
        name: np.array(
            [median_exact([getattr(v, name) for v in vecs]) for vecs in per_checkpoint]
        )
        for name in METRIC_NAMES
    }


def rewards_series(run: RunRecord) -> np.ndarray:
    return np.array([cp.checkpoint_reward for cp in run.checkpoints])


def train_steps(run: RunRecord) -> np.ndarray:
    return np.array([cp.train_step for cp in run.checkpoints], dtype=np.int64)


def descriptor_matrix(series_list, interval: int = 100) -> np.ndarray:
    """Stack DescriptorVector rows for a list of 1-D series."""
    return np.array([descriptors(s, interval=interval).as_array() for s in series_list])


def descriptor_features(series, interval: int = 100) -> np.ndarray:
    """Descriptor vector of one series, as a feature row."""
    return descriptors(series, interval=interval).as_array()


DESCRIPTOR_COLUMNS = DESCRIPTOR_NAMES
