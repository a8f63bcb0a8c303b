"""Synthetic Gaussian dynamical systems and scripted training runs.

Var1System is a stationary first-order vector autoregression
x[t+1] = A x[t] + eps, eps ~ N(0, noise_cov). Its exact stationary and
lag-1 covariances come from the discrete Lyapunov fixed point, from which
closed-form information quantities (and decomposition atoms) follow; that
is the analytic oracle behind the sampled estimators.

gen_synthetic_run scripts a whole training run: per checkpoint, a global-
mode system whose coupling follows ``coupling_curve`` generates the test
episodes, and episode returns follow ``reward_curve`` plus seeded noise.
The programmed ground truth is embedded as JSON in the run's architecture
metadata string.

Profiles are JSON documents::

    {
      "name": "aligned",            # optional, default "synthetic"
      "n_units": 8,
      "n_checkpoints": 12,
      "episodes_per_checkpoint": 4,
      "T": 400,
      "checkpoint_interval": 5000,  # optional, default 5000
      "noise_scale": 1.0,           # optional innovation std
      "reward_noise_sigma": null,   # optional; default 5% of the reward range
      "reward_curve":   {"kind": "saturating", "low": 0, "high": 100, "rate": 3},
      "coupling_curve": {"kind": "linear", "low": 0.1, "high": 0.9}
    }

Curve kinds: "constant" (value), "linear" (low -> high), "saturating"
(low + (high-low) * (1 - exp(-rate f)) / (1 - exp(-rate))), "logistic"
(low + (high-low) * sigmoid(rate (f - center))), with f the checkpoint
fraction in [0, 1].
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .trajdata import CheckpointRecord, EpisodeRecord, LatentTrajectory, RunRecord

LYAPUNOV_TOL = 1e-12
LYAPUNOV_MAX_ITER = 10**6


@dataclass(frozen=True)
class Var1System:
    """Stationary VAR(1): transition matrix, innovation covariance."""

    a: np.ndarray
    noise_cov: np.ndarray
    spectral_radius: float = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        q = np.asarray(self.noise_cov, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("transition matrix must be square")
        if q.shape != a.shape:
            raise ValueError("noise covariance must match the transition matrix")
        if np.max(np.abs(q - q.T)) > 1e-10:
            raise ValueError("noise covariance must be symmetric")
        radius = float(np.max(np.abs(np.linalg.eigvals(a))))
        if radius >= 1.0:
            raise ValueError(f"spectral radius {radius} >= 1: system not stationary")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "noise_cov", q)
        object.__setattr__(self, "spectral_radius", radius)

    @property
    def n(self) -> int:
        return self.a.shape[0]


def stationary_cov_var1(sys: Var1System):
    """Solve S = A S A' + Q by fixed-point iteration to 1e-12.

    Returns (S, S_lag1) with S_lag1 = cov(x[t], x[t+1]) = S A'.
    """
    s = sys.noise_cov.copy()
    a = sys.a
    for _ in range(LYAPUNOV_MAX_ITER):
        nxt = a @ s @ a.T + sys.noise_cov
        if np.max(np.abs(nxt - s)) <= LYAPUNOV_TOL:
            s = 0.5 * (nxt + nxt.T)
            return s, s @ a.T
        s = nxt
    raise RuntimeError("Lyapunov fixed point did not converge within 1e6 iterations")


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(m)
    return evecs @ np.diag(np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T


def gen_var1(sys: Var1System, T: int, seed, x0=None) -> LatentTrajectory:
    """Sample a length-T trajectory; x0 defaults to a stationary draw."""
    if T < 2:
        raise ValueError("T must be >= 2")
    rng = np.random.default_rng(seed)
    stat_cov, _ = stationary_cov_var1(sys)
    if x0 is None:
        x0 = _psd_sqrt(stat_cov) @ rng.standard_normal(sys.n)
    else:
        x0 = np.asarray(x0, dtype=np.float64)
    eps = rng.standard_normal((T - 1, sys.n)) @ _psd_sqrt(sys.noise_cov).T
    values = _kernels.var1_simulate(
        np.ascontiguousarray(sys.a), np.ascontiguousarray(eps), np.ascontiguousarray(x0)
    )
    return LatentTrajectory(values, episode_id=f"var1-{seed}")


def stationary_joint_cov(sys: Var1System) -> np.ndarray:
    """2n x 2n covariance of (x[t], x[t+1]) at stationarity."""
    s, s_lag = stationary_cov_var1(sys)
    return np.block([[s, s_lag], [s_lag.T, s]])


def coarse_pair_cov(sys: Var1System, side_a, side_b) -> np.ndarray:
    """Exact 4 x 4 covariance of the coarse-grained pair (mean over side_a,
    mean over side_b) at times t and t+1; oracle input for the atom solver."""
    n = sys.n
    proj = np.zeros((2, n))
    proj[0, list(side_a)] = 1.0 / len(side_a)
    proj[1, list(side_b)] = 1.0 / len(side_b)
    s, s_lag = stationary_cov_var1(sys)
    s_c = proj @ s @ proj.T
    lag_c = proj @ s_lag @ proj.T
    return np.block([[s_c, lag_c], [lag_c.T, s_c]])


def global_mode_system(n: int, coupling: float, noise_scale: float = 1.0) -> Var1System:
    """x[t+1] = coupling * mean(x[t]) * ones + noise: every unit is driven by
    the shared mean, so the whole predicts the parts beyond any single part."""
    if n < 2:
        raise ValueError("global-mode system needs n >= 2")
    a = np.full((n, n), coupling / n)
    return Var1System(a, noise_scale**2 * np.eye(n))


# ---------------------------------------------------------------------------
# Scripted runs
# ---------------------------------------------------------------------------

CURVE_KINDS = ("constant", "linear", "saturating", "logistic")


def curve_value(spec: dict, frac: float) -> float:
    """Evaluate a reward/coupling curve at checkpoint fraction ``frac``."""
    kind = spec.get("kind")
    if kind not in CURVE_KINDS:
        raise ValueError(f"unknown curve kind {kind!r}; expected one of {CURVE_KINDS}")
    if kind == "constant":
        return float(spec["value"])
    low = float(spec["low"])
    high = float(spec["high"])
    if kind == "linear":
        return low + (high - low) * frac
    if kind == "saturating":
        rate = float(spec.get("rate", 3.0))
        return low + (high - low) * (1.0 - math.exp(-rate * frac)) / (1.0 - math.exp(-rate))
    rate = float(spec.get("rate", 8.0))
    center = float(spec.get("center", 0.5))
    return low + (high - low) / (1.0 + math.exp(-rate * (frac - center)))


def _curve_range(spec: dict) -> float:
    if spec.get("kind") == "constant":
        return 0.0
    return abs(float(spec["high"]) - float(spec["low"]))


@dataclass(frozen=True)
class RunProfile:
    """Scripted-run parameters; see the module docstring for the JSON form."""

    n_units: int
    n_checkpoints: int
    episodes_per_checkpoint: int
    T: int
    reward_curve: dict
    coupling_curve: dict
    checkpoint_interval: int = 5000
    noise_scale: float = 1.0
    reward_noise_sigma: float | None = None
    name: str = "synthetic"

    def __post_init__(self):
        for fieldname in ("n_units", "n_checkpoints", "episodes_per_checkpoint", "T"):
            if getattr(self, fieldname) < 1:
                raise ValueError(f"{fieldname} must be >= 1")
        if self.n_units < 2:
            raise ValueError("n_units must be >= 2")
        if self.T < 2:
            raise ValueError("T must be >= 2")
        curve_value(self.reward_curve, 0.0)
        curve_value(self.coupling_curve, 0.0)

    @classmethod
    def from_json(cls, source) -> "RunProfile":
        if isinstance(source, (str, Path)):
            data = json.loads(Path(source).read_text(encoding="utf-8"))
        else:
            data = dict(source)
        known = {f for f in cls.__dataclass_fields__ if f != "name"} | {"name"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown profile field(s): {sorted(unknown)}")
        return cls(**data)


def gen_synthetic_run(profile: RunProfile, seed: int) -> RunRecord:
    """Generate a full scripted run with its ground truth in the metadata."""
    k_total = profile.n_checkpoints
    sigma = profile.reward_noise_sigma
    if sigma is None:
        sigma = 0.05 * _curve_range(profile.reward_curve)
    couplings = []
    reward_targets = []
    checkpoints = []
    for k in range(k_total):
        frac = k / (k_total - 1) if k_total > 1 else 0.0
        coupling = curve_value(profile.coupling_curve, frac)
        target = curve_value(profile.reward_curve, frac)
        couplings.append(coupling)
        reward_targets.append(target)
        system = global_mode_system(profile.n_units, coupling, profile.noise_scale)
        step = k * profile.checkpoint_interval
        episodes = []
        for e in range(profile.episodes_per_checkpoint):
            traj = gen_var1(system, profile.T, (seed, k, e))
            # quantise to float32 precision so bundles round-trip bit-exactly
            values = traj.values.astype(np.float32).astype(np.float64)
            latents = LatentTrajectory(values, episode_id=f"{step}_{e}")
            ep_rng = np.random.default_rng((seed, k, e, 1))
            ret = target + sigma * ep_rng.standard_normal()
            step_rewards = np.full(profile.T, ret / profile.T)
            episodes.append(EpisodeRecord.from_parts(latents, step_rewards, seed=e))
        checkpoints.append(CheckpointRecord.from_episodes(step, episodes))
    truth = {
        "couplings": couplings,
        "reward_targets": reward_targets,
        "reward_noise_sigma": sigma,
        "seed": seed,
    }
    return RunRecord(
        run_id=f"{profile.name}-{seed:05d}",
        env_name=profile.name,
        algorithm="var1-global-mode",
        architecture=json.dumps(truth, sort_keys=True),
        checkpoints=tuple(checkpoints),
        n_units=profile.n_units,
    )
