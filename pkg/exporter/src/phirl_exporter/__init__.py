"""Checkpoint recorder for RL latent-activation trajectories."""

__version__ = "0.1.0"

from .config import ExportConfig  # noqa: F401
from .recorder import record_checkpoint_episodes  # noqa: F401
from .export import train_and_export  # noqa: F401
