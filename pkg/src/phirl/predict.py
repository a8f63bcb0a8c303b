"""Correlation screening and early-window final-reward prediction, plus
re-exports of the statistical tests used across the toolkit.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .forest import LinearModel, RandomForest
from .metrics import METRIC_NAMES
from .series import (
    baseline_series,
    descriptor_features,
    emergence_scalar_series,
    episode_emergence,
    rewards_series,
    train_steps,
)
from .stats import TestResult, dagostino_k2, kendall, mannwhitney, spearman
from .trajdata import RunRecord

__all__ = [
    "TestResult",
    "spearman",
    "kendall",
    "mannwhitney",
    "dagostino_k2",
    "ScreenReport",
    "ScreenRow",
    "screen_correlations",
    "PredictionReport",
    "fit_predict_final_reward",
    "FEATURE_SETS",
]

MIN_SCREEN_CHECKPOINTS = 5
FEATURE_SETS = ("emergence",) + METRIC_NAMES + ("all_baselines", "all_plus_emergence")


class SkippedRunWarning(UserWarning):
    """A run was dropped from a cohort-level computation."""


class DegenerateSeriesWarning(UserWarning):
    """A constant checkpoint series made a correlation undefined."""


@dataclass(frozen=True)
class ScreenRow:
    run_id: str
    metric: str
    rho: float
    p_value: float
    significant: bool
    degenerate: bool


def _degenerate_series(v: np.ndarray) -> bool:
    """Constant up to round-off: correlations against it are meaningless
    (the entropy baseline lands here by construction, at ~1e-16 jitter)."""
    return float(np.ptp(v)) <= 1e-9 * max(1.0, float(np.max(np.abs(v))))


@dataclass(frozen=True)
class ScreenReport:
    alpha: float
    rows: tuple
    fractions: dict
    n_runs: int

    def __post_init__(self):
        for frac in self.fractions.values():
            if not 0.0 <= frac <= 1.0:
                raise ValueError("significant fraction outside [0, 1]")


def screen_correlations(
    cohort,
    alpha: float = 0.05,
    window: int = 100,
    stride: int = 10,
    threads: int = 1,
) -> ScreenReport:
    """Per run, Spearman between each baseline metric's checkpoint series and
    the emergence checkpoint series; per metric, the fraction of runs
    significant at alpha.

    Constant series (the entropy baseline is constant by construction after
    preprocessing) yield rho = 0, p = 1, flagged degenerate. Runs with fewer
    than 5 checkpoints are skipped with a warning.
    """
    runs = sorted(cohort, key=lambda r: r.run_id)
    rows = []
    used = 0
    for run in runs:
        if len(run.checkpoints) < MIN_SCREEN_CHECKPOINTS:
            warnings.warn(
                f"screen: run {run.run_id!r} skipped "
                f"({len(run.checkpoints)} checkpoints < {MIN_SCREEN_CHECKPOINTS})",
                SkippedRunWarning,
                stacklevel=2,
            )
            continue
        used += 1
        phi = emergence_scalar_series(episode_emergence(run, window, stride, threads))
        for metric, values in baseline_series(run, threads=threads).items():
            if _degenerate_series(values) or _degenerate_series(phi):
                warnings.warn(
                    f"screen: run {run.run_id!r} metric {metric}: constant series, "
                    "correlation undefined (recorded as rho=0, p=1)",
                    DegenerateSeriesWarning,
                    stacklevel=2,
                )
                rho, p, degenerate = 0.0, 1.0, True
            else:
                res = spearman(values, phi)
                rho, p, degenerate = res.statistic, res.p_value, False
            rows.append(ScreenRow(run.run_id, metric, rho, p, p < alpha, degenerate))
    fractions = {}
    for metric in METRIC_NAMES:
        ours = [r for r in rows if r.metric == metric]
        fractions[metric] = (
            sum(r.significant for r in ours) / len(ours) if ours else 0.0
        )
    return ScreenReport(alpha, tuple(rows), fractions, used)


@dataclass(frozen=True)
class PredictionReport:
    model: str
    seed: int
    folds: int
    repeats: int
    early_fraction: float
    scores: dict  # feature-set -> tuple of per-repeat pooled Spearman rho
    pairwise: dict  # "a|b" -> {"u": U statistic, "p_value": two-sided p}
    run_ids: tuple


def _early_features(run: RunRecord, early_fraction: float, window, stride, interval, threads):
    """Feature rows per feature-set from the early checkpoint series."""
    steps = train_steps(run)
    cutoff = early_fraction * steps[-1]
    early = steps <= cutoff + 1e-9
    n_early = int(early.sum())
    if n_early < 3:
        raise ValueError(
            f"run {run.run_id!r}: only {n_early} checkpoints fall in the first "
            f"{early_fraction:.0%} of training; descriptors need at least 3"
        )
    per_checkpoint = episode_emergence(run, window, stride, threads)
    phi = emergence_scalar_series(per_checkpoint)[early]
    baselines = {k: v[early] for k, v in baseline_series(run, threads=threads).items()}
    feats = {"emergence": descriptor_features(phi, interval)}
    for name in METRIC_NAMES:
        feats[name] = descriptor_features(baselines[name], interval)
    feats["all_baselines"] = np.concatenate([feats[name] for name in METRIC_NAMES])
    feats["all_plus_emergence"] = np.concatenate([feats["all_baselines"], feats["emergence"]])
    return feats


def _make_model(model: str, seed_tuple):
    if model == "forest":
        return RandomForest(seed=seed_tuple)
    if model == "linear":
        return LinearModel()
    raise ValueError(f"unknown model {model!r}; expected 'forest' or 'linear'")


def cv_folds(n_runs: int, folds: int, seed: int, repeat: int):
    """Deterministic fold assignment: a seeded shuffle split into ``folds``
    groups whose sizes differ by at most one."""
    rng = np.random.default_rng((seed, repeat))
    return np.array_split(rng.permutation(n_runs), folds)


def fit_predict_final_reward(
    cohort,
    early_fraction: float = 0.2,
    folds: int = 5,
    repeats: int = 10,
    model: str = "forest",
    seed: int = 0,
    window: int = 100,
    stride: int = 10,
    interval: int = 100,
    threads: int = 1,
) -> PredictionReport:
    """Cross-validated prediction of each run's final checkpoint reward from
    descriptors of its early checkpoint series.

    Feature sets: the emergence descriptors, each baseline metric's
    descriptors alone, all baselines concatenated, and all baselines plus
    emergence. Per repeat, runs are shuffled into folds; the pooled held-out
    predictions give one Spearman rho per repeat per feature set, and
    feature sets are compared pairwise with Mann-Whitney across repeats.
    """
    runs = sorted(cohort, key=lambda r: r.run_id)
    if len(runs) < 10:
        raise ValueError(f"prediction needs a cohort of >= 10 runs, got {len(runs)}")
    if not 0.0 < early_fraction < 1.0:
        raise ValueError("early_fraction must be in (0, 1)")
    if folds < 2:
        raise ValueError("folds must be >= 2")
    targets = np.array([run.checkpoints[-1].checkpoint_reward for run in runs])
    if np.all(targets == targets[0]):
        raise ValueError("degenerate target: every run has the same final reward")
    features = [
        _early_features(run, early_fraction, window, stride, interval, threads)
        for run in runs
    ]
    n = len(runs)
    scores = {name: [] for name in FEATURE_SETS}
    for name in FEATURE_SETS:
        x = np.array([f[name] for f in features])
        for rep in range(repeats):
            preds = np.empty(n)
            for fold_idx, test in enumerate(cv_folds(n, folds, seed, rep)):
                train = np.setdiff1d(np.arange(n), test)
                mdl = _make_model(model, (seed, rep, fold_idx))
                mdl.fit(x[train], targets[train])
                preds[test] = mdl.predict(x[test])
            try:
                rho = spearman(preds, targets).statistic
            except ValueError:
                warnings.warn(
                    f"predict: feature set {name!r} repeat {rep}: constant "
                    "predictions, score recorded as 0",
                    DegenerateSeriesWarning,
                    stacklevel=2,
                )
                rho = 0.0
            scores[name].append(rho)
    pairwise = {}
    names = list(FEATURE_SETS)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            res = mannwhitney(scores[a], scores[b])
            pairwise[f"{a}|{b}"] = {"u": res.statistic, "p_value": res.p_value}
    return PredictionReport(
        model=model,
        seed=seed,
        folds=folds,
        repeats=repeats,
        early_fraction=early_fraction,
        scores={k: tuple(v) for k, v in scores.items()},
        pairwise=pairwise,
        run_ids=tuple(run.run_id for run in runs),
    )
