"""Writer for the trajectory bundle format the analysis toolkit reads.

The format contract (mirrored here so this package stays independent of the
toolkit): ``manifest.json`` with {schema_version: 1, run_id, env_name,
algorithm, architecture, n_units, checkpoints: [{train_step, episodes:
[{latents_file, rewards_file, T, seed, episode_return}]}]}; latents as
little-endian float32 row-major T x n under ``data/``, rewards as
little-endian float64, files named ``<train_step>_<episode_index>``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class EpisodeData:
    """One recorded evaluation episode."""

    latents: np.ndarray  # (T, n) float32
    rewards: np.ndarray  # (T,) float64
    seed: int

    def __post_init__(self):
        lat = np.ascontiguousarray(self.latents, dtype=np.float32)
        rew = np.ascontiguousarray(self.rewards, dtype=np.float64)
        if lat.ndim != 2 or lat.shape[0] < 2 or lat.shape[1] < 2:
            raise ValueError(f"latents must be T x n with T >= 2, n >= 2, got {lat.shape}")
        if rew.shape != (lat.shape[0],):
            raise ValueError("rewards length must equal the episode length")
        if not (np.all(np.isfinite(lat)) and np.all(np.isfinite(rew))):
            raise ValueError("non-finite values in recorded episode")
        object.__setattr__(self, "latents", lat)
        object.__setattr__(self, "rewards", rew)

    @property
    def episode_return(self) -> float:
        # float64 sum, matching what the reader recomputes
        return float(np.sum(self.rewards))


@dataclass(frozen=True)
class CheckpointData:
    train_step: int
    episodes: tuple

    def __post_init__(self):
        if not self.episodes:
            raise ValueError(f"checkpoint {self.train_step} recorded no episodes")
        object.__setattr__(self, "episodes", tuple(self.episodes))


def write_bundle(
    out_dir,
    run_id: str,
    env_name: str,
    algorithm: str,
    architecture: str,
    checkpoints,
) -> Path:
    """Write a bundle directory; returns its path."""
    checkpoints = list(checkpoints)
    if not checkpoints:
        raise ValueError("nothing to write: no checkpoints recorded")
    n_units = int(checkpoints[0].episodes[0].latents.shape[1])
    root = Path(out_dir)
    (root / "data").mkdir(parents=True, exist_ok=True)
    manifest_cps = []
    prev_step = None
    for cp in checkpoints:
        if prev_step is not None and cp.train_step <= prev_step:
            raise ValueError("checkpoints must have strictly increasing train_step")
        prev_step = cp.train_step
        entries = []
        for idx, ep in enumerate(cp.episodes):
            if ep.latents.shape[1] != n_units:
                raise ValueError("all episodes must share the same latent width")
            stem = f"{cp.train_step}_{idx}"
            (root / "data" / f"{stem}.lat").write_bytes(
                ep.latents.astype("<f4").tobytes()
            )
            (root / "data" / f"{stem}.rew").write_bytes(
                ep.rewards.astype("<f8").tobytes()
            )
            entries.append(
                {
                    "latents_file": f"data/{stem}.lat",
                    "rewards_file": f"data/{stem}.rew",
                    "T": int(ep.latents.shape[0]),
                    "seed": int(ep.seed),
                    "episode_return": ep.episode_return,
                }
            )
        manifest_cps.append({"train_step": int(cp.train_step), "episodes": entries})
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "run_id": run_id,
        "env_name": env_name,
        "algorithm": algorithm,
        "architecture": architecture,
        "n_units": n_units,
        "checkpoints": manifest_cps,
    }
    (root / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
    )
    return root
