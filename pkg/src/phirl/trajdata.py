"""Trajectory data model and the on-disk bundle format.

A bundle is a directory with ``manifest.json`` at the root and one latent
file plus one reward file per episode under ``data/``::

    manifest.json
    data/<train_step>_<episode_index>.lat   # little-endian float32, row-major T x n
    data/<train_step>_<episode_index>.rew   # little-endian float64, length T

The manifest carries ``{schema_version: 1, run_id, env_name, algorithm,
architecture, n_units, checkpoints: [{train_step, episodes: [{latents_file,
rewards_file, T, seed, episode_return}]}]}`` with all paths relative. Latent
values live in memory as float64; writers that need bit-exact round-trips
should quantise to float32 precision before constructing records (the
synthetic generator does).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

SCHEMA_VERSION = 1
LATENT_DTYPE = "<f4"
REWARD_DTYPE = "<f8"
RETURN_RTOL = 1e-9


class BundleError(ValueError):
    """Raised by read_bundle when a bundle violates the format contract."""


def median_exact(values: Sequence[float]) -> float:
    """Median: middle element for odd counts, mean of the middle two for even."""
    s = sorted(float(v) for v in values)
    if not s:
        raise ValueError("median of empty sequence")
    m = len(s) // 2
    if len(s) % 2 == 1:
        return s[m]
    return 0.5 * (s[m - 1] + s[m])


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class LatentTrajectory:
    """T x n matrix of per-timestep latent activations for one episode."""

    values: np.ndarray
    episode_id: str = ""

    def __eq__(self, other):
        return (
            isinstance(other, LatentTrajectory)
            and self.episode_id == other.episode_id
            and self.values.shape == other.values.shape
            and np.array_equal(self.values, other.values)
        )

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError("latent trajectory must be a T x n matrix")
        if v.shape[0] < 2:
            raise ValueError(f"latent trajectory needs T >= 2, got T={v.shape[0]}")
        if v.shape[1] < 2:
            raise ValueError(f"latent trajectory needs n >= 2, got n={v.shape[1]}")
        if not np.all(np.isfinite(v)):
            t, u = np.argwhere(~np.isfinite(v))[0]
            raise ValueError(f"non-finite latent value at t={t}, unit={u}")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class EpisodeRecord:
    """One test episode: latents, per-step rewards, their sum, and the env seed."""

    latents: LatentTrajectory
    step_rewards: np.ndarray
    episode_return: float
    seed: int

    def __eq__(self, other):
        return (
            isinstance(other, EpisodeRecord)
            and self.latents == other.latents
            and np.array_equal(self.step_rewards, other.step_rewards)
            and self.episode_return == other.episode_return
            and self.seed == other.seed
        )

    def __post_init__(self):
        r = np.asarray(self.step_rewards, dtype=np.float64)
        if r.ndim != 1 or r.shape[0] != self.latents.T:
            raise ValueError(
                f"episode {self.latents.episode_id!r}: step_rewards length "
                f"{r.shape[0]} != T {self.latents.T}"
            )
        if not np.all(np.isfinite(r)):
            raise ValueError(f"episode {self.latents.episode_id!r}: non-finite step reward")
        total = float(np.sum(r))
        if abs(self.episode_return - total) > RETURN_RTOL * max(1.0, abs(total)):
            raise ValueError(
                f"episode {self.latents.episode_id!r}: episode_return "
                f"{self.episode_return} != sum of step_rewards {total}"
            )
        object.__setattr__(self, "step_rewards", _freeze(r))
        object.__setattr__(self, "episode_return", float(self.episode_return))
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def from_parts(cls, latents, step_rewards, seed):
        rewards = np.asarray(step_rewards, dtype=np.float64)
        return cls(latents, rewards, float(np.sum(rewards)), seed)


@dataclass(frozen=True)
class CheckpointRecord:
    """Episodes rolled out from one frozen policy, plus the median return."""

    train_step: int
    episodes: tuple
    checkpoint_reward: float

    def __post_init__(self):
        eps = tuple(self.episodes)
        if not eps:
            raise ValueError(f"checkpoint {self.train_step}: no episodes")
        med = median_exact([e.episode_return for e in eps])
        if self.checkpoint_reward != med:
            raise ValueError(
                f"checkpoint {self.train_step}: checkpoint_reward "
                f"{self.checkpoint_reward} != median of episode returns {med}"
            )
        object.__setattr__(self, "episodes", eps)
        object.__setattr__(self, "train_step", int(self.train_step))
        object.__setattr__(self, "checkpoint_reward", float(self.checkpoint_reward))

    @classmethod
    def from_episodes(cls, train_step, episodes):
        eps = tuple(episodes)
        return cls(train_step, eps, median_exact([e.episode_return for e in eps]))


@dataclass(frozen=True)
class RunRecord:
    """One training run: ordered checkpoints of test-episode trajectories."""

    run_id: str
    env_name: str
    algorithm: str
    architecture: str
    checkpoints: tuple
    n_units: int

    def __post_init__(self):
        cps = tuple(self.checkpoints)
        steps = [c.train_step for c in cps]
        for k in range(1, len(steps)):
            if steps[k] <= steps[k - 1]:
                raise ValueError(
                    f"run {self.run_id!r}: train_step not strictly increasing at "
                    f"checkpoint {k} ({steps[k - 1]} -> {steps[k]})"
                )
        for c in cps:
            for e in c.episodes:
                if e.latents.n != self.n_units:
                    raise ValueError(
                        f"run {self.run_id!r}: episode {e.latents.episode_id!r} has "
                        f"n={e.latents.n}, expected n_units={self.n_units}"
                    )
        object.__setattr__(self, "checkpoints", cps)
        object.__setattr__(self, "n_units", int(self.n_units))


@dataclass(frozen=True)
class ValidationReport:
    """Every violated invariant found in a bundle, with its location."""

    issues: tuple

    @property
    def ok(self) -> bool:
        return not self.issues


def write_bundle(run: RunRecord, path) -> None:
    """Write ``run`` as a bundle directory; re-reading yields an equal record.

    Records are re-validated before anything touches disk.
    """
    _revalidate(run)
    root = Path(path)
    (root / "data").mkdir(parents=True, exist_ok=True)
    checkpoints = []
    for cp in run.checkpoints:
        episodes = []
        for idx, ep in enumerate(cp.episodes):
            stem = f"{cp.train_step}_{idx}"
            lat_name = f"data/{stem}.lat"
            rew_name = f"data/{stem}.rew"
            (root / lat_name).write_bytes(
                np.ascontiguousarray(ep.latents.values, dtype=LATENT_DTYPE).tobytes()
            )
            (root / rew_name).write_bytes(
                np.ascontiguousarray(ep.step_rewards, dtype=REWARD_DTYPE).tobytes()
            )
            episodes.append(
                {
                    "latents_file": lat_name,
                    "rewards_file": rew_name,
                    "T": ep.latents.T,
                    "seed": ep.seed,
                    "episode_return": ep.episode_return,
                }
            )
        checkpoints.append({"train_step": cp.train_step, "episodes": episodes})
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "run_id": run.run_id,
        "env_name": run.env_name,
        "algorithm": run.algorithm,
        "architecture": run.architecture,
        "n_units": run.n_units,
        "checkpoints": checkpoints,
    }
    (root / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
    )


def _revalidate(run: RunRecord) -> None:
    RunRecord(
        run.run_id,
        run.env_name,
        run.algorithm,
        run.architecture,
        tuple(
            CheckpointRecord(c.train_step, c.episodes, c.checkpoint_reward)
            for c in run.checkpoints
        ),
        run.n_units,
    )


def read_bundle(path) -> RunRecord:
    """Load and validate a bundle; raises BundleError on any violation."""
    run, issues = _walk_bundle(path, stop_on_first=True)
    if issues:
        raise BundleError(issues[0])
    return run


def validate_bundle(path) -> ValidationReport:
    """Collect every invariant violation; empty iff read_bundle would succeed."""
    _, issues = _walk_bundle(path, stop_on_first=False)
    return ValidationReport(tuple(issues))


def _walk_bundle(path, stop_on_first: bool):
    root = Path(path)
    issues: list[str] = []

    def bad(msg: str) -> bool:
        issues.append(msg)
        return stop_on_first

    mpath = root / "manifest.json"
    if not mpath.is_file():
        bad(f"missing manifest: {mpath}")
        return None, issues
    try:
        manifest = json.loads(mpath.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        bad(f"corrupt manifest: {exc}")
        return None, issues
    if not isinstance(manifest, dict):
        bad("corrupt manifest: top level is not an object")
        return None, issues
    if manifest.get("schema_version") != SCHEMA_VERSION:
        bad(
            f"unsupported schema_version {manifest.get('schema_version')!r}, "
            f"expected {SCHEMA_VERSION}"
        )
        return None, issues
    for key in ("run_id", "env_name", "algorithm", "architecture", "n_units", "checkpoints"):
        if key not in manifest:
            if bad(f"manifest missing field {key!r}"):
                return None, issues
    if issues and stop_on_first:
        return None, issues
    n_units = manifest.get("n_units")
    checkpoints = []
    prev_step = None
    for k, cp in enumerate(manifest.get("checkpoints", [])):
        step = cp.get("train_step")
        if not isinstance(step, int):
            if bad(f"checkpoint {k}: train_step missing or not an integer"):
                return None, issues
            continue
        if prev_step is not None and step <= prev_step:
            if bad(
                f"run: train_step not strictly increasing at checkpoint {k} "
                f"({prev_step} -> {step})"
            ):
                return None, issues
        prev_step = step
        episodes = []
        manifest_eps = cp.get("episodes", [])
        if not manifest_eps:
            if bad(f"checkpoint {step}: no episodes"):
                return None, issues
            continue
        for i, meta in enumerate(manifest_eps):
            ep, ep_issues = _load_episode(root, step, i, meta, n_units)
            issues.extend(ep_issues)
            if ep_issues and stop_on_first:
                return None, issues
            if ep is not None:
                episodes.append(ep)
        if episodes:
            try:
                checkpoints.append(CheckpointRecord.from_episodes(step, episodes))
            except ValueError as exc:
                if bad(f"checkpoint {step}: {exc}"):
                    return None, issues
    if issues:
        return None, issues
    try:
        run = RunRecord(
            manifest["run_id"],
            manifest["env_name"],
            manifest["algorithm"],
            manifest["architecture"],
            tuple(checkpoints),
            manifest["n_units"],
        )
    except (ValueError, TypeError) as exc:
        bad(f"run: {exc}")
        return None, issues
    return run, issues


def _load_episode(root: Path, step: int, index: int, meta: dict, n_units):
    issues: list[str] = []
    label = f"episode {step}_{index}"
    t = meta.get("T")
    if not isinstance(t, int) or t < 2:
        issues.append(f"{label}: manifest T missing or < 2 (got {t!r})")
        return None, issues
    if not isinstance(n_units, int) or n_units < 2:
        issues.append(f"{label}: manifest n_units missing or < 2 (got {n_units!r})")
        return None, issues
    lat_file = meta.get("latents_file")
    rew_file = meta.get("rewards_file")
    for key, name in (("latents_file", lat_file), ("rewards_file", rew_file)):
        if not isinstance(name, str):
            issues.append(f"{label}: manifest missing {key}")
            return None, issues
    lat_path = root / lat_file
    rew_path = root / rew_file
    for p in (lat_path, rew_path):
        if not p.is_file():
            issues.append(f"{label}: missing data file {p.name}")
            return None, issues
    lat_bytes = lat_path.read_bytes()
    expected = 4 * t * n_units
    if len(lat_bytes) != expected:
        issues.append(
            f"{label}: latent file {lat_path.name} has {len(lat_bytes)} bytes, "
            f"expected {expected} (T={t}, n={n_units})"
        )
        return None, issues
    rew_bytes = rew_path.read_bytes()
    if len(rew_bytes) != 8 * t:
        issues.append(
            f"{label}: reward file {rew_path.name} has {len(rew_bytes)} bytes, "
            f"expected {8 * t} (T={t})"
        )
        return None, issues
    values = np.frombuffer(lat_bytes, dtype=LATENT_DTYPE).reshape(t, n_units)
    if not np.all(np.isfinite(values)):
        ti, ui = np.argwhere(~np.isfinite(values))[0]
        issues.append(f"{label}: non-finite latent value at t={ti}, unit={ui}")
        return None, issues
    rewards = np.frombuffer(rew_bytes, dtype=REWARD_DTYPE)
    if not np.all(np.isfinite(rewards)):
        issues.append(f"{label}: non-finite step reward")
        return None, issues
    er = meta.get("episode_return")
    if not isinstance(er, (int, float)):
        issues.append(f"{label}: manifest episode_return missing")
        return None, issues
    seed = meta.get("seed")
    if not isinstance(seed, int):
        issues.append(f"{label}: manifest seed missing or not an integer")
        return None, issues
    try:
        traj = LatentTrajectory(values.astype(np.float64), episode_id=Path(lat_file).stem)
        ep = EpisodeRecord(traj, rewards.astype(np.float64), float(er), seed)
    except ValueError as exc:
        issues.append(f"{label}: {exc}")
        return None, issues
    return ep, issues
