"""Cross-component contract: every bundle the exporter writes is accepted by
the analysis toolkit with zero validation errors, and the emergence pipeline
processes it end to end. The toolkit is driven only through its CLI.
"""
import json
import shutil
import subprocess
import sys
import time

import numpy as np
import pytest

from phirl_exporter.cli import main as export_main
from phirl_exporter.config import ExportConfig
from phirl_exporter.export import train_and_export

PHIRL = shutil.which("phirl")

pytestmark = pytest.mark.skipif(
    PHIRL is None, reason="primary phirl CLI not installed; integration skipped"
)


def run_phirl(*args):
    return subprocess.run([PHIRL, *args], capture_output=True, text=True)


@pytest.fixture(scope="module")
def exported_bundle(tmp_path_factory):
    cfg = ExportConfig(
        env_name="pendulum",
        algorithm="reinforce",
        architecture="mlp",
        total_steps=10_000,
        checkpoint_interval=5_000,
        test_episodes_per_checkpoint=3,
        latent_dim=64,
        seed=0,
    )
    out = tmp_path_factory.mktemp("export") / "bundle"
    start = time.monotonic()
    path = train_and_export(cfg, out)
    elapsed = time.monotonic() - start
    return path, elapsed


def test_exporter_run_validates_and_emerges(exported_bundle, tmp_path):
    path, train_elapsed = exported_bundle
    start = time.monotonic()
    proc = run_phirl("validate", str(path))
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["results"]["ok"]
    assert report["results"]["issues"] == []

    out = tmp_path / "emerge.json"
    proc = run_phirl("emerge", str(path), "--window", "100", "--stride", "10",
                     "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    emerge = json.loads(out.read_text())
    series = emerge["results"]["checkpoint_series"]
    assert len(series) == 3
    assert all(np.isfinite(v) for v in series)
    total = train_elapsed + (time.monotonic() - start)
    assert total < 600.0
    print(f"\nACCEPTANCE 11 PASS: exporter bundle (3 checkpoints, latent_dim=64) "
          f"validated with zero errors and emerged end-to-end in {total:.0f}s")


def test_exporter_manifest_records_config(exported_bundle):
    path, _ = exported_bundle
    manifest = json.loads((path / "manifest.json").read_text())
    assert manifest["schema_version"] == 1
    assert manifest["env_name"] == "pendulum"
    assert manifest["algorithm"] == "reinforce"
    assert manifest["architecture"] == "mlp"
    assert manifest["n_units"] == 64
    steps = [cp["train_step"] for cp in manifest["checkpoints"]]
    assert steps == [0, 5000, 10000]
    for cp in manifest["checkpoints"]:
        assert len(cp["episodes"]) == 3


def test_checkpoint_rewards_not_all_equal(exported_bundle):
    path, _ = exported_bundle
    manifest = json.loads((path / "manifest.json").read_text())
    medians = []
    for cp in manifest["checkpoints"]:
        returns = sorted(ep["episode_return"] for ep in cp["episodes"])
        medians.append(returns[len(returns) // 2])
    assert len(set(medians)) > 1


def test_cli_script_round_trip(tmp_path):
    cfg = dict(
        env_name="pendulum",
        algorithm="reinforce",
        architecture="gru",
        total_steps=600,
        checkpoint_interval=300,
        test_episodes_per_checkpoint=2,
        latent_dim=4,
        seed=1,
    )
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "bundle"
    assert export_main(["--config", str(cfg_path), "--out", str(out)]) == 0
    proc = run_phirl("validate", str(out))
    assert proc.returncode == 0, proc.stderr


def test_sb3_adapter_when_available(tmp_path):
    sb3 = pytest.importorskip("stable_baselines3")
    gym = pytest.importorskip("gymnasium")
    from phirl_exporter.sb3_adapter import make_sb3_host

    env = gym.make("Pendulum-v1")
    model = sb3.PPO("MlpPolicy", env, seed=0, n_steps=64)
    cfg = ExportConfig(
        env_name="Pendulum-v1",
        algorithm="ppo",
        architecture="mlp",
        total_steps=256,
        checkpoint_interval=128,
        test_episodes_per_checkpoint=2,
        latent_dim=64,
        seed=0,
    )
    host = make_sb3_host(cfg, model, gym.make("Pendulum-v1"))
    path = train_and_export(cfg, tmp_path / "bundle", host=host)
    proc = run_phirl("validate", str(path))
    assert proc.returncode == 0, proc.stderr
