"""Causal-emergence analysis of multivariate latent-activation time series."""

__version__ = "0.1.0"

from .trajdata import (  # noqa: F401
    BundleError,
    CheckpointRecord,
    EpisodeRecord,
    LatentTrajectory,
    RunRecord,
    ValidationReport,
    median_exact,
    read_bundle,
    validate_bundle,
    write_bundle,
)
