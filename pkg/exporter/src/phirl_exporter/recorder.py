"""Checkpoint recording against a minimal policy/env protocol.

A policy handle must expose ``act(obs, deterministic=...) -> (action, z)``
where z is the feature-extractor output for that step (for recurrent
policies: the post-recurrent hidden state), plus ``reset_state()`` called at
episode starts. An env handle must expose ``reset(seed) -> obs`` and
``step(action) -> (obs, reward, done)``.
"""
from __future__ import annotations

import warnings

import numpy as np

from .bundle import CheckpointData, EpisodeData
from .config import ExportConfig


class LatentHookMissing(TypeError):
    """The policy handle does not expose per-step latent activations."""


def _check_protocol(policy, env) -> None:
    if not callable(getattr(policy, "act", None)):
        raise LatentHookMissing(
            "policy handle has no act(obs, deterministic=...) -> (action, latent) "
            "method; the recorder needs the feature-extractor output at each step"
        )
    for name in ("reset", "step"):
        if not callable(getattr(env, name, None)):
            raise TypeError(f"env handle lacks {name}()")


def rollout_episode(policy, env, seed: int, max_steps: int = 10_000, deterministic=True):
    """One evaluation episode; returns (latents (T, n), rewards (T,))."""
    obs = env.reset(seed=seed)
    if callable(getattr(policy, "reset_state", None)):
        policy.reset_state()
    latents = []
    rewards = []
    for _ in range(max_steps):
        action, z = policy.act(obs, deterministic=deterministic)
        z = np.asarray(z, dtype=np.float64).ravel()
        obs, reward, done = env.step(action)
        latents.append(z)
        rewards.append(float(reward))
        if done:
            break
    return np.asarray(latents), np.asarray(rewards)


def record_checkpoint_episodes(policy, env, cfg: ExportConfig, train_step: int = 0):
    """Roll out cfg.test_episodes_per_checkpoint evaluation episodes with
    distinct derived seeds and assemble a checkpoint record.

    Episodes shorter than 2 steps are skipped with a warning. Evaluation uses
    the deterministic action mode.
    """
    _check_protocol(policy, env)
    episodes = []
    for e in range(cfg.test_episodes_per_checkpoint):
        seed = int(
            np.random.SeedSequence((cfg.seed, train_step, e)).generate_state(1)[0]
        )
        latents, rewards = rollout_episode(policy, env, seed=seed)
        if latents.shape[0] < 2:
            warnings.warn(
                f"checkpoint {train_step}: episode {e} lasted "
                f"{latents.shape[0]} step(s); skipped",
                stacklevel=2,
            )
            continue
        if latents.shape[1] != cfg.latent_dim:
            raise ValueError(
                f"policy produced latents of width {latents.shape[1]}, "
                f"config says latent_dim={cfg.latent_dim}"
            )
        episodes.append(EpisodeData(latents, rewards, seed=seed))
    return CheckpointData(train_step, tuple(episodes))
