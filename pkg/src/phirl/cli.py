"""Command-line interface.

Subcommands: validate, emerge, metrics, screen, align, predict, synth.
Every report is a canonical JSON envelope (see report.py); ``--csv FILE``
additionally writes a flat table. Exit codes: 0 success, 1 validation or
input error, 2 internal error. ``--threads`` caps worker parallelism
(PHIRL_THREADS is the environment fallback) and never changes the output.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
import warnings

import numpy as np

from .alignment import align_run, align_run_null
from .metrics import baseline_metrics
from .predict import fit_predict_final_reward, mannwhitney, screen_correlations
from .preprocess import preprocess
from .report import envelope, write_csv, write_report
from .series import (
    baseline_series,
    emergence_scalar_series,
    episode_emergence,
)
from .synth import RunProfile, gen_synthetic_run
from .trajdata import BundleError, median_exact, read_bundle, validate_bundle, write_bundle


class _Parser(argparse.ArgumentParser):
    """argparse with exit code 1 on usage errors (default is 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _default_threads() -> int:
    raw = os.environ.get("PHIRL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> _Parser:
    parser = _Parser(prog="phirl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, bundles="+", seed=False):
        if bundles:
            p.add_argument("bundle", nargs=bundles, help="trajectory bundle directory")
        p.add_argument("--out", help="write the JSON report to this file")
        p.add_argument("--csv", help="additionally write a flat CSV table")
        p.add_argument("--threads", type=int, default=_default_threads())
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("validate", help="check a bundle against the format contract")
    common(p, bundles=None)
    p.add_argument("bundle", help="trajectory bundle directory")

    p = sub.add_parser("emerge", help="per-episode emergence trajectories and medians")
    common(p, bundles=None)
    p.add_argument("bundle", help="trajectory bundle directory")
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--stride", type=int, default=10)

    p = sub.add_parser("metrics", help="baseline representation metric series")
    common(p, bundles=None)
    p.add_argument("bundle", help="trajectory bundle directory")

    p = sub.add_parser("screen", help="correlation screen of baselines vs emergence")
    common(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--stride", type=int, default=10)

    p = sub.add_parser("align", help="reward-alignment scores with a random-projection null")
    common(p, seed=True)
    p.add_argument("--m", type=int, default=2, help="PCA embedding dimension")
    p.add_argument("--no-residualize", action="store_true")
    p.add_argument("--null-draws", type=int, default=1000)
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--stride", type=int, default=10)
    p.add_argument("--interval", type=int, default=100)

    p = sub.add_parser("predict", help="early-window prediction of final reward")
    common(p, seed=True)
    p.add_argument("--early-frac", type=float, default=0.2)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--model", choices=["forest", "linear"], default="forest")
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--stride", type=int, default=10)

    p = sub.add_parser("synth", help="generate scripted synthetic bundles")
    p.add_argument("--profile", required=True, help="run profile JSON file")
    p.add_argument("--out", required=True, help="output bundle directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1, help="number of bundles to generate")
    p.add_argument("--threads", type=int, default=_default_threads())

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = _HANDLERS[args.command]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            results, config, exit_code = handler(args)
        except (BundleError, ValueError, OSError, json.JSONDecodeError) as exc:
            print(f"phirl {args.command}: error: {exc}", file=sys.stderr)
            return 1
        except Exception:
            traceback.print_exc()
            return 2
    report = envelope(args.command, config, results, (w.message for w in caught))
    text = write_report(report, getattr(args, "out", None) if args.command != "synth" else None)
    if getattr(args, "out", None) is None or args.command == "synth":
        sys.stdout.write(text)
    if getattr(args, "csv", None):
        write_csv(_csv_rows(args.command, results), args.csv)
    return exit_code


def _cmd_validate(args):
    report = validate_bundle(args.bundle)
    results = {"bundle": args.bundle, "ok": report.ok, "issues": list(report.issues)}
    return results, {"bundle": args.bundle}, 0 if report.ok else 1


def _cmd_emerge(args):
    run = read_bundle(args.bundle)
    per_checkpoint = episode_emergence(run, args.window, args.stride, args.threads)
    checkpoints = []
    for cp, emts in zip(run.checkpoints, per_checkpoint):
        episodes = [
            {
                "episode_id": ep.latents.episode_id,
                "median": emt.median,
                "values": list(emt.values),
            }
            for ep, emt in zip(cp.episodes, emts)
        ]
        checkpoints.append(
            {
                "train_step": cp.train_step,
                "episodes": episodes,
                "median": median_exact([emt.median for emt in emts]),
            }
        )
    results = {
        "run_id": run.run_id,
        "env_name": run.env_name,
        "n_units": run.n_units,
        "checkpoints": checkpoints,
        "checkpoint_series": emergence_scalar_series(per_checkpoint),
    }
    config = {"bundle": args.bundle, "window": args.window, "stride": args.stride}
    return results, config, 0


def _cmd_metrics(args):
    run = read_bundle(args.bundle)
    medians = baseline_series(run, threads=args.threads)
    checkpoints = []
    for cp in run.checkpoints:
        episodes = [
            {"episode_id": ep.latents.episode_id}
            | baseline_metrics(preprocess(ep.latents)).as_dict()
            for ep in cp.episodes
        ]
        checkpoints.append({"train_step": cp.train_step, "episodes": episodes})
    results = {
        "run_id": run.run_id,
        "env_name": run.env_name,
        "checkpoints": checkpoints,
        "series": {k: v for k, v in medians.items()},
        "rewards": [cp.checkpoint_reward for cp in run.checkpoints],
    }
    return results, {"bundle": args.bundle}, 0


def _cmd_screen(args):
    cohort = [read_bundle(b) for b in args.bundle]
    rep = screen_correlations(
        cohort, alpha=args.alpha, window=args.window, stride=args.stride, threads=args.threads
    )
    results = {
        "n_runs": rep.n_runs,
        "rows": [vars(r) for r in rep.rows],
        "fractions": rep.fractions,
    }
    config = {
        "bundles": list(args.bundle),
        "alpha": args.alpha,
        "window": args.window,
        "stride": args.stride,
    }
    return results, config, 0


def _cmd_align(args):
    cohort = sorted((read_bundle(b) for b in args.bundle), key=lambda r: r.run_id)
    residualize = not args.no_residualize
    rows = []
    null_pool = []
    kwargs = dict(
        m=args.m,
        window=args.window,
        stride=args.stride,
        interval=args.interval,
        threads=args.threads,
    )
    for idx, run in enumerate(cohort):
        scores = align_run(run, residualize=residualize, **kwargs)
        null = align_run_null(
            run, n_draws=args.null_draws, seed=(args.seed, idx), **kwargs
        )
        null_pool.append(null)
        rows.append(
            {
                "run_id": run.run_id,
                "env_name": run.env_name,
                "global_alignment": scores.global_alignment,
                "local_alignment": scores.local_alignment,
                "degenerate": scores.degenerate,
            }
        )
    null_pool = np.concatenate(null_pool)
    observed = np.array([r["global_alignment"] for r in rows])
    mw = mannwhitney(np.abs(observed), np.abs(null_pool))
    envs = sorted(set(r["env_name"] for r in rows))
    per_env = {
        env: {
            "median_global": median_exact(
                [r["global_alignment"] for r in rows if r["env_name"] == env]
            ),
            "median_local": median_exact(
                [r["local_alignment"] for r in rows if r["env_name"] == env]
            ),
        }
        for env in envs
    }
    results = {
        "rows": rows,
        "summary": {
            "median_global": median_exact(observed),
            "median_local": median_exact([r["local_alignment"] for r in rows]),
        },
        "per_env": per_env,
        "null": {
            "n_draws": args.null_draws,
            "median_abs_observed": median_exact(np.abs(observed)),
            "median_abs_null": median_exact(np.abs(null_pool)),
            "mannwhitney_u": mw.statistic,
            "p_value": mw.p_value,
        },
    }
    config = {
        "bundles": list(args.bundle),
        "m": args.m,
        "residualize": residualize,
        "null_draws": args.null_draws,
        "seed": args.seed,
        "window": args.window,
        "stride": args.stride,
        "interval": args.interval,
    }
    return results, config, 0


def _cmd_predict(args):
    cohort = [read_bundle(b) for b in args.bundle]
    rep = fit_predict_final_reward(
        cohort,
        early_fraction=args.early_frac,
        folds=args.folds,
        repeats=args.repeats,
        model=args.model,
        seed=args.seed,
        window=args.window,
        stride=args.stride,
        threads=args.threads,
    )
    results = {
        "model": rep.model,
        "run_ids": list(rep.run_ids),
        "scores": {k: list(v) for k, v in rep.scores.items()},
        "median_scores": {k: median_exact(v) for k, v in rep.scores.items()},
        "pairwise": rep.pairwise,
    }
    config = {
        "bundles": list(args.bundle),
        "early_frac": args.early_frac,
        "folds": args.folds,
        "repeats": args.repeats,
        "model": args.model,
        "seed": args.seed,
        "window": args.window,
        "stride": args.stride,
    }
    return results, config, 0


def _cmd_synth(args):
    profile = RunProfile.from_json(args.profile)
    if args.runs < 1:
        raise ValueError("--runs must be >= 1")
    bundles = []
    run_ids = []
    for i in range(args.runs):
        run = gen_synthetic_run(profile, args.seed + i)
        out = args.out if args.runs == 1 else os.path.join(args.out, f"run_{i:03d}")
        write_bundle(run, out)
        bundles.append(out)
        run_ids.append(run.run_id)
    results = {"bundles": bundles, "run_ids": run_ids}
    config = {
        "profile": args.profile,
        "out": args.out,
        "seed": args.seed,
        "runs": args.runs,
    }
    return results, config, 0


def _csv_rows(command: str, results: dict):
    if command == "emerge":
        return [
            {
                "run_id": results["run_id"],
                "train_step": cp["train_step"],
                "episode_id": ep["episode_id"],
                "window_index": i,
                "value": v,
            }
            for cp in results["checkpoints"]
            for ep in cp["episodes"]
            for i, v in enumerate(ep["values"])
        ]
    if command == "metrics":
        return [
            {
                "run_id": results["run_id"],
                "train_step": cp["train_step"],
                "episode_id": ep["episode_id"],
                "metric": name,
                "value": ep[name],
            }
            for cp in results["checkpoints"]
            for ep in cp["episodes"]
            for name in ep
            if name != "episode_id"
        ]
    if command == "screen":
        return results["rows"]
    if command == "align":
        return results["rows"]
    if command == "predict":
        return [
            {"feature_set": name, "repeat": i, "rho": rho}
            for name, scores in results["scores"].items()
            for i, rho in enumerate(scores)
        ]
    if command == "validate":
        return [{"issue": i} for i in results["issues"]]
    return []


_HANDLERS = {
    "validate": _cmd_validate,
    "emerge": _cmd_emerge,
    "metrics": _cmd_metrics,
    "screen": _cmd_screen,
    "align": _cmd_align,
    "predict": _cmd_predict,
    "synth": _cmd_synth,
}


if __name__ == "__main__":
    sys.exit(main())
