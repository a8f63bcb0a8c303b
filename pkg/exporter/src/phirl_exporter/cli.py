"""Standalone exporter script.

Usage:
    phirl-export --config config.json --out bundle_dir

The config JSON mirrors ExportConfig::

    {
      "env_name": "pendulum",
      "algorithm": "reinforce",
      "architecture": "mlp",
      "total_steps": 10000,
      "checkpoint_interval": 5000,
      "test_episodes_per_checkpoint": 3,
      "latent_dim": 64,
      "seed": 0
    }
"""
from __future__ import annotations

import argparse
import sys

from .config import ExportConfig
from .export import train_and_export


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="phirl-export", description=__doc__)
    parser.add_argument("--config", required=True, help="ExportConfig JSON file")
    parser.add_argument("--out", required=True, help="output bundle directory")
    args = parser.parse_args(argv)
    try:
        cfg = ExportConfig.from_json(args.config)
        path = train_and_export(cfg, args.out)
    except (ValueError, OSError) as exc:
        print(f"phirl-export: error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
