"""Acceptance suite: one test per criterion, at the stated tolerance, each
printing one PASS line (a failed assertion fails the test, so the line only
appears for criteria that hold).

Run with:  pytest tests/test_acceptance.py -v -s
"""
import json
import time
import warnings

import numpy as np
import pytest

from phirl.alignment import align_run, align_run_null
from phirl.cli import main
from phirl.gaussinfo import gaussian_mi_bivariate, gaussian_mi_blocks, pearson
from phirl.metrics import descriptors
from phirl.phiid import (
    exhaustive_min_cut_bipartition,
    fiedler_bipartition,
    phiid_atoms,
    phiid_atoms_from_cov,
)
from phirl.predict import fit_predict_final_reward
from phirl.preprocess import normality_fraction, rank_normalize
from phirl.stats import dagostino_k2, mannwhitney, mannwhitney_brute_force
from phirl.synth import (
    RunProfile,
    Var1System,
    gen_synthetic_run,
    gen_var1,
    stationary_joint_cov,
)
from phirl.trajdata import CheckpointRecord, EpisodeRecord, LatentTrajectory, RunRecord


def report(num, text):
    print(f"\nACCEPTANCE {num:02d} PASS: {text}")


# ---------------------------------------------------------------------------

def test_criterion_01_gaussian_mi_closed_form():
    start = time.monotonic()
    rho = 0.8
    target = 0.510826
    rng = np.random.default_rng(1001)
    chol = np.linalg.cholesky(np.array([[1.0, rho], [rho, 1.0]]))
    sample = rng.standard_normal((10**6, 2)) @ chol.T
    est = gaussian_mi_bivariate(pearson(sample[:, 0], sample[:, 1]))
    elapsed = time.monotonic() - start
    assert abs(est - target) < 1e-2
    assert elapsed < 10.0
    report(1, f"sampled bivariate MI {est:.6f} within 1e-2 of {target} in {elapsed:.1f}s")


def test_criterion_02_phiid_exactness():
    rng = np.random.default_rng(1002)
    for _ in range(1000):
        w = rng.normal(size=(4, rng.integers(4, 8)))
        cov = w @ w.T + rng.uniform(0.05, 0.5) * np.eye(4)
        atoms = phiid_atoms_from_cov(cov)
        total = gaussian_mi_blocks(cov, 2)
        i1 = gaussian_mi_blocks(cov[np.ix_([0, 2, 3], [0, 2, 3])], 1)
        i2 = gaussian_mi_blocks(cov[np.ix_([1, 2, 3], [1, 2, 3])], 1)
        assert atoms.residual <= 1e-9
        assert abs(atoms.total - total) <= 1e-9
        assert abs(atoms.phi_r - (total - max(i1, i2))) <= 1e-9
        assert atoms.phi_r >= -1e-9
    report(2, "1000 random covariances: downset sums, atom total, phi_r identity "
              "all within 1e-9; phi_r >= -1e-9")


def test_criterion_03_analytic_oracle_agreement():
    start = time.monotonic()
    rng = np.random.default_rng(1003)
    worst = 0.0
    for k in range(20):
        a = rng.normal(size=(2, 2))
        radius = np.max(np.abs(np.linalg.eigvals(a)))
        a *= rng.uniform(0.3, 0.9) / radius
        w = rng.normal(size=(2, 3))
        sys = Var1System(a, w @ w.T + 0.5 * np.eye(2))
        analytic = phiid_atoms_from_cov(stationary_joint_cov(sys))
        sampled = phiid_atoms(gen_var1(sys, 10**6, seed=(1003, k)))
        for name, value in sampled.atoms.items():
            worst = max(worst, abs(value - analytic.atoms[name]))
    elapsed = time.monotonic() - start
    assert worst < 0.02
    assert elapsed < 120.0
    report(3, f"20 systems at T=1e6: worst atom error {worst:.4f} < 0.02 in {elapsed:.0f}s")


def test_criterion_04_bipartition_oracle():
    rng = np.random.default_rng(1004)
    fiedler_hits = 0
    oracle_hits = 0
    for _ in range(50):
        n = int(rng.integers(4, 9))
        k = int(rng.integers(2, n - 1))
        perm = rng.permutation(n)
        block = set(perm[:k].tolist())
        w = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                same = (i in block) == (j in block)
                w[i, j] = rng.uniform(0.8, 1.2) if same else rng.uniform(0.05, 0.15)
        w = 0.5 * (w + w.T)
        np.fill_diagonal(w, 0.0)
        planted = {tuple(sorted(block)), tuple(sorted(set(range(n)) - block))}
        part = fiedler_bipartition(w)
        oracle = exhaustive_min_cut_bipartition(w)
        if {part.side_a, part.side_b} == planted:
            fiedler_hits += 1
        if {oracle.side_a, oracle.side_b} == planted:
            oracle_hits += 1
    assert oracle_hits >= 48
    assert fiedler_hits >= 48
    report(4, f"planted split recovered by Fiedler {fiedler_hits}/50 and "
              f"exhaustive oracle {oracle_hits}/50 (both >= 48)")


def test_criterion_05_preprocessing_normality():
    rng = np.random.default_rng(1005)
    traj = LatentTrajectory(rng.exponential(size=(1000, 64)))
    raw = normality_fraction(traj, alpha=0.05).fraction_rejecting
    fixed = normality_fraction(rank_normalize(traj), alpha=0.05).fraction_rejecting
    assert raw >= 0.95
    assert fixed <= 0.08
    report(5, f"exponential data rejects at {raw:.2f} >= 0.95; after rank-normal "
              f"transform {fixed:.2f} <= 0.08")


def test_criterion_06_descriptor_values():
    ramp = descriptors([0.0, 1.0, 2.0, 3.0, 4.0])
    assert ramp.std == pytest.approx(1.5811, abs=1e-4)
    assert ramp.trend == pytest.approx(1.0, abs=1e-12)
    assert ramp.monotonicity == pytest.approx(1.0, abs=1e-12)
    assert ramp.n_peaks == 0
    assert ramp.peak_distance == 0.0
    assert ramp.peak_difference == 0.0
    assert ramp.range == 0.0
    sine = descriptors(np.sin(2 * np.pi * np.arange(100) / 20))
    assert sine.n_peaks == 10
    assert sine.peak_distance == pytest.approx(10.0, abs=1e-6)
    assert sine.range == pytest.approx(2.0, abs=1e-6)
    report(6, "ramp and sampled sine reproduce descriptor values exactly / within 1e-6")


# ---------------------------------------------------------------------------

ALIGN_BASE = dict(
    n_units=8,
    n_checkpoints=40,
    episodes_per_checkpoint=6,
    T=400,
    coupling_curve={"kind": "saturating", "low": 0.05, "high": 0.95, "rate": 8.0},
    reward_noise_sigma=2.0,
)


def _alignment_cohort(reward_low, reward_high, name, n_seeds=20):
    profile = RunProfile(
        reward_curve={"kind": "saturating", "low": reward_low, "high": reward_high,
                      "rate": 8.0},
        name=name,
        **ALIGN_BASE,
    )
    scores, nulls = [], []
    for seed in range(n_seeds):
        run = gen_synthetic_run(profile, seed)
        scores.append(align_run(run, window=100, stride=20))
        nulls.append(
            align_run_null(run, n_draws=200, seed=(1007, seed), window=100, stride=20)
        )
    return scores, np.concatenate(nulls)


def test_criterion_07_alignment_end_to_end():
    start = time.monotonic()
    aligned, null = _alignment_cohort(0.0, 100.0, "aligned")
    med_global = float(np.median([s.global_alignment for s in aligned]))
    med_local = float(np.median([s.local_alignment for s in aligned]))
    observed = np.abs([s.global_alignment for s in aligned])
    mw = mannwhitney(observed, np.abs(null))
    anti, _ = _alignment_cohort(100.0, 0.0, "anti")
    med_anti = float(np.median([s.global_alignment for s in anti]))
    elapsed = time.monotonic() - start
    assert med_global >= 0.9
    assert abs(med_local) <= 0.1
    assert med_anti <= -0.9
    assert mw.p_value < 0.05 and float(np.median(observed)) > float(np.median(np.abs(null)))
    assert elapsed < 300.0
    report(7, f"aligned cohort global {med_global:.3f} >= 0.9, |local| {abs(med_local):.3f} "
              f"<= 0.1, anti {med_anti:.3f} <= -0.9, null beaten (p={mw.p_value:.1e}) "
              f"in {elapsed:.0f}s")


# ---------------------------------------------------------------------------

def _prediction_cohort(n_runs=50, seed0=2000):
    runs = []
    for i in range(n_runs):
        c = 0.2 + 0.7 * i / (n_runs - 1)
        profile = RunProfile(
            n_units=6,
            n_checkpoints=16,
            episodes_per_checkpoint=3,
            T=256,
            reward_curve={"kind": "constant", "value": 100.0 * c},
            coupling_curve={"kind": "saturating", "low": 0.05, "high": c, "rate": 8.0},
            reward_noise_sigma=0.0,
            name="planted",
        )
        runs.append(gen_synthetic_run(profile, seed0 + i))
    return runs


def _permute_final_rewards(runs, seed):
    rng = np.random.default_rng(seed)
    finals = [r.checkpoints[-1].checkpoint_reward for r in runs]
    perm = rng.permutation(len(runs))
    out = []
    for run, j in zip(runs, perm):
        last = run.checkpoints[-1]
        episodes = []
        for ep in last.episodes:
            rewards = np.full(ep.latents.T, finals[j] / ep.latents.T)
            episodes.append(EpisodeRecord.from_parts(ep.latents, rewards, ep.seed))
        new_last = CheckpointRecord.from_episodes(last.train_step, episodes)
        out.append(
            RunRecord(run.run_id, run.env_name, run.algorithm, run.architecture,
                      run.checkpoints[:-1] + (new_last,), run.n_units)
        )
    return out


def test_criterion_08_prediction_end_to_end():
    start = time.monotonic()
    cohort = _prediction_cohort()
    kwargs = dict(early_fraction=0.2, folds=5, repeats=10, seed=0, window=64, stride=32)
    forest = fit_predict_final_reward(cohort, model="forest", **kwargs)
    linear = fit_predict_final_reward(cohort, model="linear", **kwargs)
    permuted = fit_predict_final_reward(
        _permute_final_rewards(cohort, 777), model="forest", **kwargs
    )
    rho_forest = float(np.median(forest.scores["emergence"]))
    rho_linear = float(np.median(linear.scores["emergence"]))
    rho_perm = float(np.median(permuted.scores["emergence"]))
    elapsed = time.monotonic() - start
    assert rho_forest >= 0.8
    assert abs(rho_perm) <= 0.2
    assert np.sign(rho_forest) == np.sign(rho_linear)
    assert abs(rho_forest - rho_linear) <= 0.15
    assert elapsed < 300.0
    report(8, f"planted cohort: forest rho {rho_forest:.3f} >= 0.8, permuted "
              f"|rho| {abs(rho_perm):.3f} <= 0.2, linear {rho_linear:.3f} agrees "
              f"in {elapsed:.0f}s")


def test_criterion_09_statistics_oracles():
    rng = np.random.default_rng(1009)
    for na in range(1, 12):
        for nb in range(1, 13 - na):
            a = rng.normal(size=na)
            b = rng.normal(size=nb) + rng.uniform(-1, 1)
            assert mannwhitney(a, b).p_value == mannwhitney_brute_force(a, b), (na, nb)
    rejections = 0
    reps = 500
    for _ in range(reps):
        if dagostino_k2(rng.normal(size=500)).p_value < 0.05:
            rejections += 1
    fpr = rejections / reps
    assert abs(fpr - 0.05) <= 0.02
    report(9, f"Mann-Whitney exact equals enumeration for all pairs with total <= 12; "
              f"D'Agostino false-positive rate {fpr:.3f} within 0.05 +/- 0.02")


def test_criterion_10_cli_determinism(tmp_path):
    profile = {
        "name": "det",
        "n_units": 5,
        "n_checkpoints": 11,
        "episodes_per_checkpoint": 2,
        "T": 96,
        "reward_curve": {"kind": "linear", "low": 0.0, "high": 10.0},
        "coupling_curve": {"kind": "linear", "low": 0.1, "high": 0.8},
    }
    profile_path = tmp_path / "profile.json"
    profile_path.write_text(json.dumps(profile))

    def synth(out, threads):
        assert main(["synth", "--profile", str(profile_path), "--out", str(out),
                     "--seed", "5", "--runs", "10", "--threads", str(threads)]) == 0
        return sorted(str(p) for p in out.iterdir())

    bundles_a = synth(tmp_path / "cohort_a", 1)
    bundles_b = synth(tmp_path / "cohort_b", 4)
    for pa, pb in zip(bundles_a, bundles_b):
        assert (tmp_path / pa / "manifest.json").read_bytes() == \
            (tmp_path / pb / "manifest.json").read_bytes()

    single = bundles_a[0]
    commands = {
        "validate": ["validate", single],
        "emerge": ["emerge", single, "--window", "48", "--stride", "24"],
        "metrics": ["metrics", single],
        "screen": ["screen", *bundles_a, "--window", "48", "--stride", "24"],
        "align": ["align", *bundles_a, "--window", "48", "--stride", "24",
                  "--null-draws", "150", "--seed", "3"],
        "predict": ["predict", *bundles_a, "--early-frac", "0.3", "--folds", "3",
                    "--repeats", "2", "--model", "forest", "--window", "48",
                    "--stride", "24", "--seed", "3"],
    }
    for name, argv in commands.items():
        outputs = []
        for threads, tag in [(1, "a"), (1, "b"), (4, "c")]:
            out = tmp_path / f"{name}_{tag}.json"
            rc = main([*argv, "--threads", str(threads), "--out", str(out)])
            assert rc == 0, name
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1], f"{name}: rerun differs"
        assert outputs[0] == outputs[2], f"{name}: --threads changed the report"
    report(10, "all CLI commands byte-identical across reruns and --threads 1 vs 4")
