"""Reward-alignment scoring: PCA embedding of descriptor points, time
residualization, linear reward gradient, and cosine alignment between the
gradient and the trajectory's direction of travel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEGENERATE_NORM = 1e-12
DEFAULT_EMBED_DIM = 2


@dataclass(frozen=True)
class AlignmentScores:
    global_alignment: float
    local_alignment: float
    degenerate: bool
    m: int

    def __post_init__(self):
        for score in (self.global_alignment, self.local_alignment):
            if not -1.0 <= score <= 1.0:
                raise ValueError(f"alignment score {score} outside [-1, 1]")
        if self.degenerate and (self.global_alignment != 0.0 or self.local_alignment != 0.0):
            raise ValueError("degenerate scores must be reported as 0")


def embed_pca(points: np.ndarray, m: int) -> np.ndarray:
    """Z-score columns, then project onto the top-m principal directions.

    Directions are eigenvectors of the sample covariance in descending
    eigenvalue order, each sign-fixed so its largest-magnitude loading is
    positive. Constant columns z-score to zeros.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a K x d matrix")
    k, d = points.shape
    if not 1 <= m <= d:
        raise ValueError(f"need 1 <= m <= {d}, got m={m}")
    if k <= m:
        raise ValueError(f"need more points than embedding dimensions: K={k} <= m={m}")
    z = np.zeros_like(points)
    for j in range(d):
        col = points[:, j]
        if np.all(col == col[0]):
            continue
        z[:, j] = (col - col.mean()) / col.std(ddof=1)
    evals, evecs = np.linalg.eigh(np.cov(z.T, ddof=1))
    top = evecs[:, ::-1][:, :m].copy()
    for c in range(m):
        lead = np.argmax(np.abs(top[:, c]))
        if top[lead, c] < 0.0:
            top[:, c] = -top[:, c]
    return z @ top


def residualize_time(series: np.ndarray) -> np.ndarray:
    """Replace each column by its OLS residual against the index 0..K-1."""
    series = np.asarray(series, dtype=np.float64)
    flat = series.ndim == 1
    x = series[:, None] if flat else series
    k = x.shape[0]
    if k < 3:
        raise ValueError(f"residualize_time needs K >= 3, got K={k}")
    design = np.column_stack([np.ones(k), np.arange(k, dtype=np.float64)])
    beta, *_ = np.linalg.lstsq(design, x, rcond=None)
    resid = x - design @ beta
    return resid[:, 0] if flat else resid


def _cos(u: np.ndarray, v: np.ndarray) -> float:
    c = float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))
    return max(-1.0, min(1.0, c))


def reward_alignment(
    embedding: np.ndarray, reward, residualize: bool = True
) -> AlignmentScores:
    """Global and local cosine alignment between the fitted reward gradient
    and the embedding path.

    The gradient w is the least-squares coefficient vector predicting the
    (centered) reward from the (centered) embedding; with ``residualize``
    both sides of that fit are first replaced by their OLS residuals against
    time, which removes the shared linear drift from the gradient estimate
    (the Frisch-Waugh confound control). The path directions themselves are
    taken from the embedding as given: global alignment is
    cos(w, e_last - e_first), local alignment the mean step cosine,
    skipping zero-norm steps. Vanishing w or endpoint difference makes the
    result degenerate (scores 0).
    """
    e = np.asarray(embedding, dtype=np.float64)
    r = np.asarray(reward, dtype=np.float64).ravel()
    if e.ndim != 2 or e.shape[0] != r.size:
        raise ValueError("embedding must be K x m with a length-K reward")
    k, m = e.shape
    if k <= m + 1:
        raise ValueError(f"need K >= m + 2, got K={k}, m={m}")
    if residualize:
        e_fit = residualize_time(e)
        r_fit = residualize_time(r)
    else:
        e_fit, r_fit = e, r
    ec = e_fit - e_fit.mean(axis=0)
    rc = r_fit - r_fit.mean()
    # a fit on numerically vanished residuals (e.g. a perfectly linear case
    # after residualization) is vacuous: round-off over round-off
    if np.linalg.norm(rc) <= DEGENERATE_NORM * max(1.0, np.linalg.norm(r)):
        return AlignmentScores(0.0, 0.0, True, m)
    if np.linalg.norm(ec) <= DEGENERATE_NORM * max(1.0, np.linalg.norm(e)):
        return AlignmentScores(0.0, 0.0, True, m)
    w, *_ = np.linalg.lstsq(ec, rc, rcond=None)
    delta = e[-1] - e[0]
    if np.linalg.norm(w) < DEGENERATE_NORM or np.linalg.norm(delta) < DEGENERATE_NORM:
        return AlignmentScores(0.0, 0.0, True, m)
    global_score = _cos(w, delta)
    steps = np.diff(e, axis=0)
    norms = np.linalg.norm(steps, axis=1)
    keep = norms >= DEGENERATE_NORM
    if not np.any(keep):
        local_score = 0.0
    else:
        local_score = float(np.mean(steps[keep] @ w / (norms[keep] * np.linalg.norm(w))))
        local_score = max(-1.0, min(1.0, local_score))
    return AlignmentScores(global_score, local_score, False, m)


def random_projection_null(
    embedding: np.ndarray,
    reward,
    n_draws: int = 1000,
    seed: int = 0,
) -> np.ndarray:
    """Global-alignment scores with the fitted gradient replaced by unit
    vectors drawn uniformly on the m-sphere; the comparison distribution for
    the observed global score. The reward argument is accepted for signature
    symmetry with reward_alignment but does not enter the null scores (only
    the gradient is randomised, and the path direction never depends on the
    reward).
    """
    e = np.asarray(embedding, dtype=np.float64)
    r = np.asarray(reward, dtype=np.float64).ravel()
    if e.ndim != 2 or e.shape[0] != r.size:
        raise ValueError("embedding must be K x m with a length-K reward")
    if n_draws < 100:
        raise ValueError(f"n_draws must be >= 100, got {n_draws}")
    delta = e[-1] - e[0]
    if np.linalg.norm(delta) < DEGENERATE_NORM:
        return np.zeros(n_draws)
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((n_draws, e.shape[1]))
    norms = np.linalg.norm(draws, axis=1)
    norms[norms == 0.0] = 1.0
    unit = draws / norms[:, None]
    scores = unit @ delta / np.linalg.norm(delta)
    return np.clip(scores, -1.0, 1.0)


def _run_embedding(run, m, window, stride, interval, threads):
    from .series import (
        checkpoint_median_trajectories,
        descriptor_matrix,
        episode_emergence,
        rewards_series,
    )

    per_checkpoint = episode_emergence(run, window=window, stride=stride, threads=threads)
    points = descriptor_matrix(checkpoint_median_trajectories(per_checkpoint), interval)
    return embed_pca(points, m), rewards_series(run)


def align_run(
    run,
    m: int = DEFAULT_EMBED_DIM,
    residualize: bool = True,
    window: int = 100,
    stride: int = 10,
    interval: int = 100,
    threads: int = 1,
) -> AlignmentScores:
    """Alignment scores at checkpoint scale: each checkpoint's median
    emergence window trajectory becomes one descriptor point, the checkpoint
    rewards are the reward series."""
    embedding, rewards = _run_embedding(run, m, window, stride, interval, threads)
    return reward_alignment(embedding, rewards, residualize=residualize)


def align_run_null(
    run,
    n_draws: int = 1000,
    seed: int = 0,
    m: int = DEFAULT_EMBED_DIM,
    window: int = 100,
    stride: int = 10,
    interval: int = 100,
    threads: int = 1,
) -> np.ndarray:
    """Random-projection null scores for the same embedding as align_run."""
    embedding, rewards = _run_embedding(run, m, window, stride, interval, threads)
    return random_projection_null(embedding, rewards, n_draws=n_draws, seed=seed)
