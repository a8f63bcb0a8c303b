"""Adapter exposing stable-baselines3 models and gymnasium envs through the
recorder protocol. Imports lazily so the exporter works without sb3 installed;
the built-in host covers that case.
"""
from __future__ import annotations

import numpy as np

from .recorder import LatentHookMissing


class SB3Policy:
    """Wraps an sb3 model; the latent is the features-extractor output."""

    def __init__(self, model):
        try:
            import torch  # noqa: F401
        except ImportError as exc:  # pragma: no cover
            raise ImportError("the sb3 adapter needs torch installed") from exc
        policy = getattr(model, "policy", None)
        if policy is None or not hasattr(policy, "extract_features"):
            raise LatentHookMissing(
                "model.policy.extract_features is missing; cannot capture the "
                "feature-extractor output"
            )
        self.model = model

    def reset_state(self):
        pass  # feed-forward policies carry no recurrent state

    def act(self, obs, deterministic: bool = True):
        import torch

        policy = self.model.policy
        obs_t, _ = policy.obs_to_tensor(np.asarray(obs))
        with torch.no_grad():
            features = policy.extract_features(obs_t)
            if isinstance(features, tuple):  # separate actor/critic extractors
                features = features[0]
        action, _ = self.model.predict(np.asarray(obs), deterministic=deterministic)
        return action, features.cpu().numpy().ravel()


class GymEnv:
    """Wraps a gymnasium env: reset(seed) -> obs, step -> (obs, reward, done)."""

    def __init__(self, env):
        self.env = env

    def reset(self, seed=None):
        obs, _ = self.env.reset(seed=seed)
        return obs

    def step(self, action):
        obs, reward, terminated, truncated, _ = self.env.step(action)
        return obs, float(reward), bool(terminated or truncated)


class SB3Trainer:
    """train_until() on top of model.learn(), tracking environment steps."""

    def __init__(self, model):
        self.model = model
        self.steps_done = 0

    def train_until(self, target_steps: int) -> None:
        remaining = target_steps - self.steps_done
        if remaining > 0:
            self.model.learn(total_timesteps=remaining, reset_num_timesteps=False)
            self.steps_done = target_steps


def make_sb3_host(cfg, model, gym_env):
    """(env, policy, trainer) triple for train_and_export."""
    return GymEnv(gym_env), SB3Policy(model), SB3Trainer(model)
