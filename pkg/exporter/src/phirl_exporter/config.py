"""Export configuration, loadable from a JSON file of the same shape."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

ARCHITECTURES = ("mlp", "gru")


@dataclass(frozen=True)
class ExportConfig:
    env_name: str
    algorithm: str
    architecture: str
    total_steps: int
    checkpoint_interval: int
    test_episodes_per_checkpoint: int
    latent_dim: int
    seed: int

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(
                f"architecture must be one of {ARCHITECTURES}, got {self.architecture!r}"
            )
        if self.latent_dim < 2:
            raise ValueError(f"latent_dim must be >= 2, got {self.latent_dim}")
        if self.total_steps < 1 or self.checkpoint_interval < 1:
            raise ValueError("total_steps and checkpoint_interval must be >= 1")
        if self.total_steps % self.checkpoint_interval != 0:
            raise ValueError(
                f"checkpoint_interval {self.checkpoint_interval} does not divide "
                f"total_steps {self.total_steps}"
            )
        if self.test_episodes_per_checkpoint < 1:
            raise ValueError("test_episodes_per_checkpoint must be >= 1")

    @property
    def checkpoint_steps(self) -> list:
        """Recording schedule: every interval, including step 0."""
        return list(range(0, self.total_steps + 1, self.checkpoint_interval))

    @classmethod
    def from_json(cls, source) -> "ExportConfig":
        if isinstance(source, (str, Path)):
            data = json.loads(Path(source).read_text(encoding="utf-8"))
        else:
            data = dict(source)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config field(s): {sorted(unknown)}")
        return cls(**data)
