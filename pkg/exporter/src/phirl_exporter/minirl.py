"""Built-in training host: a pendulum swing-up task and a small REINFORCE
learner whose policies expose their feature-extractor output.

This exists so the exporter can run end to end on a bare CPU box; any other
framework can be plugged in through the same policy/env protocol (see
``sb3_adapter`` for a stable-baselines3 wrapper).
"""
from __future__ import annotations

import numpy as np
import torch
from torch import nn


class PendulumEnv:
    """Classic underactuated pendulum swing-up with a quadratic cost reward."""

    max_torque = 2.0
    max_speed = 8.0
    dt = 0.05
    g = 10.0
    m = 1.0
    length = 1.0
    episode_steps = 200

    def __init__(self):
        self._rng = np.random.default_rng(0)
        self._theta = 0.0
        self._theta_dot = 0.0
        self._t = 0

    def reset(self, seed=None):
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self._theta = self._rng.uniform(-np.pi, np.pi)
        self._theta_dot = self._rng.uniform(-1.0, 1.0)
        self._t = 0
        return self._obs()

    def _obs(self):
        return np.array([np.cos(self._theta), np.sin(self._theta), self._theta_dot])

    def step(self, action):
        u = float(np.clip(np.asarray(action).ravel()[0], -self.max_torque, self.max_torque))
        theta = self._theta
        angle = ((theta + np.pi) % (2.0 * np.pi)) - np.pi
        reward = -(angle**2 + 0.1 * self._theta_dot**2 + 0.001 * u**2)
        accel = (
            3.0 * self.g / (2.0 * self.length) * np.sin(theta)
            + 3.0 / (self.m * self.length**2) * u
        )
        self._theta_dot = float(np.clip(self._theta_dot + accel * self.dt, -self.max_speed, self.max_speed))
        self._theta = theta + self._theta_dot * self.dt
        self._t += 1
        return self._obs(), reward, self._t >= self.episode_steps

    @property
    def obs_dim(self):
        return 3


class GaussianPolicy(nn.Module):
    """Feature extractor + Gaussian action head; act() returns the latent."""

    def __init__(self, obs_dim: int, latent_dim: int, architecture: str, seed: int):
        super().__init__()
        torch.manual_seed(seed)
        self.architecture = architecture
        self.latent_dim = latent_dim
        self.encoder = nn.Sequential(nn.Linear(obs_dim, latent_dim), nn.Tanh())
        if architecture == "gru":
            self.gru = nn.GRUCell(latent_dim, latent_dim)
        else:
            self.gru = None
        self.mean_head = nn.Linear(latent_dim, 1)
        self.log_std = nn.Parameter(torch.zeros(1))
        self._hidden = None

    def reset_state(self):
        self._hidden = None

    def features(self, obs: torch.Tensor) -> torch.Tensor:
        z = self.encoder(obs)
        if self.gru is not None:
            if self._hidden is None:
                self._hidden = torch.zeros(1, self.latent_dim)
            self._hidden = self.gru(z.view(1, -1), self._hidden)
            z = self._hidden.view(-1)  # post-recurrent hidden state
        return z

    def act(self, obs, deterministic: bool = True):
        with torch.no_grad():
            z = self.features(torch.as_tensor(obs, dtype=torch.float32))
            mean = self.mean_head(z)
            if deterministic:
                action = mean
            else:
                action = mean + self.log_std.exp() * torch.randn_like(mean)
        return action.numpy(), z.numpy().copy()

    def distribution(self, obs: torch.Tensor):
        z = self.features(obs)
        mean = self.mean_head(z)
        return torch.distributions.Normal(mean, self.log_std.exp())


class ReinforceTrainer:
    """Per-episode REINFORCE with a running-mean baseline."""

    def __init__(self, policy: GaussianPolicy, env: PendulumEnv, seed: int, lr: float = 3e-3):
        self.policy = policy
        self.env = env
        self.rng = np.random.default_rng((seed, 1))
        self.optimizer = torch.optim.Adam(policy.parameters(), lr=lr)
        self.baseline = None
        self.steps_done = 0

    def train_episode(self) -> float:
        obs = self.env.reset(seed=int(self.rng.integers(2**31)))
        self.policy.reset_state()
        log_probs = []
        rewards = []
        done = False
        while not done:
            dist = self.policy.distribution(torch.as_tensor(obs, dtype=torch.float32))
            action = dist.sample()
            log_probs.append(dist.log_prob(action).sum())
            obs, reward, done = self.env.step(action.detach().numpy())
            rewards.append(reward)
        self.steps_done += len(rewards)
        episode_return = float(np.sum(rewards))
        if self.baseline is None:
            self.baseline = episode_return
        advantage = episode_return - self.baseline
        self.baseline = 0.9 * self.baseline + 0.1 * episode_return
        loss = -advantage * torch.stack(log_probs).sum() / len(log_probs)
        self.optimizer.zero_grad()
        loss.backward()
        self.optimizer.step()
        return episode_return

    def train_until(self, target_steps: int) -> None:
        while self.steps_done < target_steps:
            self.train_episode()


def make_host(cfg):
    """Env + policy + trainer for the built-in pendulum task."""
    env = PendulumEnv()
    policy = GaussianPolicy(env.obs_dim, cfg.latent_dim, cfg.architecture, cfg.seed)
    trainer = ReinforceTrainer(policy, env, seed=cfg.seed)
    return env, policy, trainer
