"""Train-and-export: run a policy through its training schedule, recording
evaluation episodes at every checkpoint, and write the trajectory bundle."""
from __future__ import annotations

from pathlib import Path

from .bundle import write_bundle
from .config import ExportConfig
from .minirl import PendulumEnv, make_host
from .recorder import record_checkpoint_episodes

BUILTIN_ENVS = ("pendulum",)


def train_and_export(cfg: ExportConfig, out_dir, host=None) -> Path:
    """Train for cfg.total_steps, recording at every checkpoint_interval
    (including step 0), then write the bundle.

    ``host`` may supply a custom (env, policy, trainer) triple satisfying the
    recorder protocol plus ``trainer.train_until(steps)``; by default the
    built-in pendulum host is used for cfg.env_name in {"pendulum"}.
    """
    if host is not None:
        env, policy, trainer = host
    elif cfg.env_name in BUILTIN_ENVS:
        env, policy, trainer = make_host(cfg)
    else:
        raise ValueError(
            f"env {cfg.env_name!r} is not a built-in ({BUILTIN_ENVS}); pass a "
            "host triple or use the stable-baselines3 adapter"
        )
    eval_env = PendulumEnv() if host is None else env
    checkpoints = []
    for step in cfg.checkpoint_steps:
        trainer.train_until(step)
        checkpoints.append(record_checkpoint_episodes(policy, eval_env, cfg, train_step=step))
    return write_bundle(
        out_dir,
        run_id=f"{cfg.env_name}-{cfg.algorithm}-{cfg.architecture}-{cfg.seed:05d}",
        env_name=cfg.env_name,
        algorithm=cfg.algorithm,
        architecture=cfg.architecture,
        checkpoints=checkpoints,
    )
