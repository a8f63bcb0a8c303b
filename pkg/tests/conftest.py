import numpy as np
import pytest

from phirl.trajdata import (
    CheckpointRecord,
    EpisodeRecord,
    LatentTrajectory,
    RunRecord,
)


def f32(values):
    """Quantise to float32 precision (what the bundle format stores)."""
    return np.asarray(values, dtype=np.float32).astype(np.float64)


def make_episode(rng, t=8, n=3, episode_id="0_0", seed=0):
    latents = LatentTrajectory(f32(rng.normal(size=(t, n))), episode_id=episode_id)
    rewards = rng.normal(size=t)
    return EpisodeRecord.from_parts(latents, rewards, seed)


def make_run(rng, n_checkpoints=3, episodes=2, t=8, n=3, run_id="run-0", step=5000):
    checkpoints = []
    for k in range(n_checkpoints):
        eps = [
            make_episode(rng, t=t, n=n, episode_id=f"{k * step}_{e}", seed=e)
            for e in range(episodes)
        ]
        checkpoints.append(CheckpointRecord.from_episodes(k * step, eps))
    return RunRecord(run_id, "test-env", "test-alg", "mlp", tuple(checkpoints), n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
