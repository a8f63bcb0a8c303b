import json

import numpy as np
import pytest

from phirl.stats import spearman
from phirl.synth import (
    RunProfile,
    Var1System,
    coarse_pair_cov,
    curve_value,
    gen_synthetic_run,
    gen_var1,
    global_mode_system,
    stationary_cov_var1,
    stationary_joint_cov,
)
from phirl.trajdata import read_bundle, validate_bundle, write_bundle


def test_var1_requires_stationarity():
    with pytest.raises(ValueError, match="spectral radius"):
        Var1System(np.eye(2), np.eye(2))
    with pytest.raises(ValueError, match="symmetric"):
        Var1System(0.5 * np.eye(2), np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_stationary_cov_memoryless():
    q = np.array([[2.0, 0.3], [0.3, 1.0]])
    sys = Var1System(np.zeros((2, 2)), q)
    stat, lag = stationary_cov_var1(sys)
    assert np.allclose(stat, q, atol=1e-12)
    assert np.allclose(lag, 0.0, atol=1e-12)


def test_stationary_cov_scalar_closed_form():
    sys = Var1System(np.array([[0.9]]), np.array([[1.0]]))
    stat, lag = stationary_cov_var1(sys)
    assert stat[0, 0] == pytest.approx(1.0 / 0.19, abs=1e-9)
    assert lag[0, 0] / stat[0, 0] == pytest.approx(0.9, abs=1e-12)


def test_gen_var1_memoryless_covariance(rng):
    q = np.array([[1.0, 0.4], [0.4, 2.0]])
    traj = gen_var1(Var1System(np.zeros((2, 2)), q), 10**5, seed=0)
    sample = np.cov(traj.values.T, ddof=1)
    assert np.allclose(sample, q, atol=0.05)


def test_gen_var1_diagonal_autocorrelation():
    traj = gen_var1(Var1System(0.9 * np.eye(2), np.eye(2)), 10**5, seed=1)
    x = traj.values
    for j in range(2):
        ac = np.corrcoef(x[:-1, j], x[1:, j])[0, 1]
        assert ac == pytest.approx(0.9, abs=0.01)


def test_gen_var1_seed_determinism():
    sys = global_mode_system(3, 0.5)
    a = gen_var1(sys, 500, seed=7)
    b = gen_var1(sys, 500, seed=7)
    assert np.array_equal(a.values, b.values)


def test_gen_var1_explicit_start():
    sys = global_mode_system(3, 0.5)
    x0 = np.array([1.0, 2.0, 3.0])
    traj = gen_var1(sys, 10, seed=0, x0=x0)
    assert np.array_equal(traj.values[0], x0)


def test_sampled_cov_matches_analytic():
    a = np.array([[0.6, 0.2], [0.1, 0.5]])
    sys = Var1System(a, np.eye(2))
    stat, lag = stationary_cov_var1(sys)
    traj = gen_var1(sys, 10**6, seed=2)
    x = traj.values
    sample_stat = np.cov(x.T, ddof=1)
    sample_lag = (x[:-1] - x[:-1].mean(0)).T @ (x[1:] - x[1:].mean(0)) / (len(x) - 2)
    assert np.allclose(sample_stat, stat, atol=0.01)
    assert np.allclose(sample_lag, lag, atol=0.01)


def test_joint_and_coarse_cov_shapes():
    sys = global_mode_system(6, 0.8)
    joint = stationary_joint_cov(sys)
    assert joint.shape == (12, 12)
    assert np.allclose(joint, joint.T, atol=1e-12)
    pair = coarse_pair_cov(sys, [0, 1, 2], [3, 4, 5])
    assert pair.shape == (4, 4)
    assert np.allclose(pair, pair.T, atol=1e-12)


def test_coarse_pair_cov_matches_sampled():
    sys = global_mode_system(4, 0.85)
    pair = coarse_pair_cov(sys, [0, 1], [2, 3])
    traj = gen_var1(sys, 10**6, seed=3).values
    coarse = np.column_stack([traj[:, :2].mean(axis=1), traj[:, 2:].mean(axis=1)])
    z = np.column_stack([coarse[:-1], coarse[1:]])
    assert np.allclose(np.cov(z.T, ddof=1), pair, atol=0.01)


def test_curve_values():
    assert curve_value({"kind": "constant", "value": 3.0}, 0.7) == 3.0
    assert curve_value({"kind": "linear", "low": 0.0, "high": 10.0}, 0.25) == 2.5
    sat = {"kind": "saturating", "low": 0.0, "high": 1.0, "rate": 5.0}
    assert curve_value(sat, 0.0) == pytest.approx(0.0)
    assert curve_value(sat, 1.0) == pytest.approx(1.0)
    assert curve_value(sat, 0.5) > 0.5
    logi = {"kind": "logistic", "low": 0.0, "high": 1.0, "rate": 8.0, "center": 0.5}
    assert curve_value(logi, 0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError, match="curve kind"):
        curve_value({"kind": "spline"}, 0.5)


def test_profile_json_round_trip(tmp_path):
    profile = RunProfile(
        n_units=4,
        n_checkpoints=3,
        episodes_per_checkpoint=2,
        T=64,
        reward_curve={"kind": "constant", "value": 1.0},
        coupling_curve={"kind": "constant", "value": 0.3},
    )
    path = tmp_path / "profile.json"
    path.write_text(
        json.dumps(
            {
                "n_units": 4,
                "n_checkpoints": 3,
                "episodes_per_checkpoint": 2,
                "T": 64,
                "reward_curve": {"kind": "constant", "value": 1.0},
                "coupling_curve": {"kind": "constant", "value": 0.3},
            }
        )
    )
    assert RunProfile.from_json(path) == profile
    with pytest.raises(ValueError, match="unknown profile field"):
        RunProfile.from_json({"n_units": 4, "bogus": 1})


def test_gen_synthetic_run_round_trips(tmp_path):
    profile = RunProfile(
        n_units=4,
        n_checkpoints=3,
        episodes_per_checkpoint=2,
        T=64,
        reward_curve={"kind": "linear", "low": 0.0, "high": 10.0},
        coupling_curve={"kind": "linear", "low": 0.1, "high": 0.8},
    )
    run = gen_synthetic_run(profile, seed=9)
    write_bundle(run, tmp_path)
    assert validate_bundle(tmp_path).ok
    assert read_bundle(tmp_path) == run
    truth = json.loads(run.architecture)
    assert len(truth["couplings"]) == 3
    assert truth["couplings"][0] == pytest.approx(0.1)
    assert truth["couplings"][-1] == pytest.approx(0.8)
    assert truth["reward_targets"][-1] == pytest.approx(10.0)
    steps = [cp.train_step for cp in run.checkpoints]
    assert steps == [0, 5000, 10000]


def test_gen_synthetic_run_determinism():
    profile = RunProfile(
        n_units=3,
        n_checkpoints=2,
        episodes_per_checkpoint=2,
        T=32,
        reward_curve={"kind": "constant", "value": 5.0},
        coupling_curve={"kind": "constant", "value": 0.2},
        reward_noise_sigma=1.0,
    )
    a = gen_synthetic_run(profile, seed=4)
    b = gen_synthetic_run(profile, seed=4)
    assert a == b


def test_constant_profile_has_no_emergence_trend():
    # stationary null: the emergence checkpoint series shows no significant
    # monotone trend vs time in at least 95% of seeds at alpha = 0.01
    from phirl.series import emergence_scalar_series, episode_emergence

    profile = RunProfile(
        n_units=4,
        n_checkpoints=8,
        episodes_per_checkpoint=2,
        T=96,
        reward_curve={"kind": "constant", "value": 1.0},
        coupling_curve={"kind": "constant", "value": 0.4},
    )
    significant = 0
    n_seeds = 20
    for seed in range(n_seeds):
        run = gen_synthetic_run(profile, seed=seed)
        phi = emergence_scalar_series(episode_emergence(run, window=48, stride=24))
        if spearman(phi, np.arange(len(phi), dtype=float)).p_value < 0.01:
            significant += 1
    assert significant <= max(1, int(0.05 * n_seeds))
