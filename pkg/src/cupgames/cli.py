"""Batch experiment runner.

``cupgames run`` plays one experiment from a strict JSON config: a game
shape, a filler, an emptier, a trial count.  Each trial gets a seed
derived from the root seed and its absolute trial index, runs
independently (optionally across processes), and contributes sampled
metric rows to results.csv plus its maxima to summary.json.  Reruns
with the same seed are byte-identical.

``cupgames aggregate`` merges summaries from sharded runs of the same
experiment (use ``trial_offset`` to keep shard trial indices disjoint).
``cupgames oracle`` runs the brute-force cross-checks and emits a
pass/fail report.

Exit codes: 2 config/usage problems, 3 capability mismatches,
4 runtime rule violations.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool
from pathlib import Path
from typing import Optional, Sequence

from .engine import (
    CapabilityMismatch,
    GameConfig,
    GameError,
    run_game,
    as_fraction,
)
from .emptiers import emptier_from_descriptor
from .fillers import filler_from_descriptor
from .metrics import MetricSeries, default_census_levels, wasted_steps
from . import rng as _rng
from . import oracle as _oracle

__all__ = ["main", "run_experiment", "aggregate", "ConfigError", "ExperimentConfig"]

SCHEMA_VERSION = 1

_METRIC_NAMES = ("backlog", "tail_size", "queue_size", "rest", "levels",
                 "wasted_steps")
_DEFAULT_METRICS = ("backlog", "tail_size", "queue_size")

_CONFIG_KEYS = {
    "n", "steps", "seed", "p", "epsilon", "truncation_h", "snapshot_stride",
    "filler", "emptier", "trials", "trial_offset", "metrics",
    "sample_stride", "detail",
}


class ConfigError(Exception):
    """Bad experiment config; the message names what is wrong."""


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    steps: int
    seed: int
    p: int
    epsilon: Fraction
    truncation_h: Optional[int]
    snapshot_stride: int
    filler_desc: dict
    emptier_desc: dict
    trials: int
    trial_offset: int
    metrics: tuple[str, ...]
    sample_stride: int
    detail: str

    def game_config(self, seed: int) -> GameConfig:
        return GameConfig(n=self.n, steps=self.steps, seed=seed, p=self.p,
                          epsilon=self.epsilon,
                          truncation_h=self.truncation_h,
                          snapshot_stride=self.snapshot_stride)

    def key(self) -> dict:
        """What identifies an experiment when merging summaries."""
        return {
            "n": self.n,
            "p": self.p,
            "epsilon": str(self.epsilon),
            "steps": self.steps,
            "filler": self.filler_desc,
            "emptier": self.emptier_desc,
        }


def _need(d: dict, key: str, kind, what: str):
    if key not in d:
        raise ConfigError(f"missing config key: {key!r}")
    v = d[key]
    if not isinstance(v, kind) or isinstance(v, bool):
        raise ConfigError(f"config key {key!r} must be {what}")
    return v


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in raw:
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key: {key!r}")
    n = _need(raw, "n", int, "an integer")
    steps = _need(raw, "steps", int, "an integer")
    filler_desc = _need(raw, "filler", dict, "an object")
    emptier_desc = _need(raw, "emptier", dict, "an object")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("config key 'seed' must be an integer")
    p = raw.get("p", 1)
    trials = raw.get("trials", 1)
    trial_offset = raw.get("trial_offset", 0)
    snapshot_stride = raw.get("snapshot_stride", 1000)
    sample_stride = raw.get("sample_stride", 1)
    for key, v in (("p", p), ("trials", trials), ("trial_offset", trial_offset),
                   ("snapshot_stride", snapshot_stride),
                   ("sample_stride", sample_stride)):
        if not isinstance(v, int) or isinstance(v, bool):
            raise ConfigError(f"config key {key!r} must be an integer")
    if trials < 1:
        raise ConfigError("config key 'trials' must be >= 1")
    if trial_offset < 0:
        raise ConfigError("config key 'trial_offset' must be >= 0")
    if sample_stride < 1:
        raise ConfigError("config key 'sample_stride' must be >= 1")
    try:
        epsilon = as_fraction(raw.get("epsilon", 0))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"config key 'epsilon': {e}") from None
    truncation_h = raw.get("truncation_h")
    if truncation_h is not None and (not isinstance(truncation_h, int)
                                     or isinstance(truncation_h, bool)):
        raise ConfigError("config key 'truncation_h' must be an integer or null")
    detail = raw.get("detail", "full")
    if detail not in ("full", "steps", "stats"):
        raise ConfigError(f"config key 'detail' must be one of full/steps/stats")
    metrics = raw.get("metrics", list(_DEFAULT_METRICS))
    if (not isinstance(metrics, list)
            or not all(isinstance(m, str) for m in metrics)):
        raise ConfigError("config key 'metrics' must be a list of names")
    for m in metrics:
        if m not in _METRIC_NAMES:
            raise ConfigError(f"unknown metric: {m!r}")
    if len(set(metrics)) != len(metrics):
        raise ConfigError("config key 'metrics' has duplicates")
    if "wasted_steps" in metrics:
        if filler_desc.get("kind") != "fuzzing":
            raise ConfigError(
                "metric 'wasted_steps' needs the fuzzing filler")
        if detail == "stats":
            raise ConfigError(
                "metric 'wasted_steps' needs per-step detail (full or steps)")

    # Resolve the descriptors now so a bad one fails before any trial runs.
    try:
        filler_from_descriptor(filler_desc)
        emptier_from_descriptor(emptier_desc, n, seed)
    except (KeyError, TypeError) as e:
        raise ConfigError(f"bad strategy descriptor: {e}") from None
    except ValueError as e:
        raise ConfigError(str(e)) from None

    return ExperimentConfig(
        n=n, steps=steps, seed=seed, p=p, epsilon=epsilon,
        truncation_h=truncation_h, snapshot_stride=snapshot_stride,
        filler_desc=filler_desc, emptier_desc=emptier_desc,
        trials=trials, trial_offset=trial_offset,
        metrics=tuple(metrics), sample_stride=sample_stride, detail=detail)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from None
    return parse_config(raw)


# ------------------------------------------------------------ one trial


def _expanded_names(exp: ExperimentConfig) -> list[str]:
    names = []
    for m in exp.metrics:
        if m == "levels":
            names.extend(f"level_{l}" for l in range(1, default_census_levels(exp.n) + 1))
        elif m != "wasted_steps":  # per-phase, appended after the series
            names.append(m)
    return names


def _run_single_trial(exp: ExperimentConfig, trial: int, *, true_fill: bool,
                      trace_dir: Optional[str]) -> tuple[int, list, dict]:
    seed = _rng.trial_seed(exp.seed, trial)
    cfg = exp.game_config(seed)
    filler = filler_from_descriptor(exp.filler_desc)
    emptier = emptier_from_descriptor(exp.emptier_desc, exp.n, seed)

    stride = exp.sample_stride
    steps = exp.steps
    want = [m for m in exp.metrics if m != "wasted_steps"]
    q = default_census_levels(exp.n) if "levels" in want else 0
    series = MetricSeries(_expanded_names(exp))

    def observe(runner):
        t = runner.t
        if t % stride and t != steps:
            return
        den = runner.den
        fills = runner.fills
        if true_fill:
            offs = runner.offsets_num
            eff = [f - o for f, o in zip(fills, offs)]
        else:
            eff = fills
        vals = []
        for m in want:
            if m == "backlog":
                top = max(eff) if true_fill else runner.backlog_num_last
                vals.append(Fraction(max(top, 0), den))
            elif m == "tail_size":
                if true_fill:
                    two = 2 * den
                    vals.append(sum(1 for f in eff if f >= two))
                else:
                    vals.append(runner.tail)
            elif m == "queue_size":
                if true_fill:
                    vals.append(sum(f // den for f in eff if f >= den))
                else:
                    vals.append(runner.qsize)
            elif m == "rest":
                vals.append(0 if runner.emptied_last else 1)
            elif m == "levels":
                counts = [0] * q
                pris = runner.priorities_num
                for j, f in enumerate(eff):
                    if f >= den:
                        counts[(pris[j] * q) // _rng.UNIT_DEN] += 1
                vals.extend(counts)
        series.append(t, vals)

    observers = (observe,) if want else ()
    trace = run_game(cfg, filler, emptier, observers=observers,
                     detail=exp.detail)

    rows = []
    for step, name, value in series.rows():
        f = value if isinstance(value, Fraction) else Fraction(value)
        rows.append((trial, step, name, f.numerator, f.denominator))
    if "wasted_steps" in exp.metrics:
        per_phase = wasted_steps(trace)
        ann = trace.annotations
        ends = {ph["i"]: min(ph["end"], trace.steps) for ph in ann["phases"]}
        for i in sorted(per_phase):
            rows.append((trial, ends[i], "wasted_steps", per_phase[i], 1))

    mb = trace.max_backlog
    summary = {
        "trial": trial,
        "seed": seed,
        "max_backlog": [mb.numerator, mb.denominator],
        "max_tail": trace.max_tail,
        "max_queue": trace.max_qsize,
    }
    if trace_dir is not None:
        path = os.path.join(trace_dir, f"trace-{trial:04d}.ndjson")
        trace.to_ndjson(path)
        summary["trace"] = os.path.basename(path)
        summary["trace_sha256"] = trace.trace_hash()
    return trial, rows, summary


def _trial_worker(args):
    exp, trial, true_fill, trace_dir = args
    return _run_single_trial(exp, trial, true_fill=true_fill,
                             trace_dir=trace_dir)


# ------------------------------------------------------------ aggregation


def _quantile(sorted_vals: list, q: Fraction):
    """Order statistic at level q: the ceil(q*T)-th smallest."""
    t = len(sorted_vals)
    idx = -((-q.numerator * t) // q.denominator)  # ceil(q*T)
    return sorted_vals[max(idx, 1) - 1]


def _aggregate_stats(trial_summaries: list[dict]) -> dict:
    out = {}
    for field in ("max_backlog", "max_tail", "max_queue"):
        vals = []
        for ts in trial_summaries:
            v = ts[field]
            vals.append(Fraction(v[0], v[1]) if isinstance(v, list) else Fraction(v))
        vals.sort()
        mean = sum(vals, Fraction(0)) / len(vals)
        p99 = _quantile(vals, Fraction(99, 100))
        out[field] = {
            "max": [vals[-1].numerator, vals[-1].denominator],
            "mean": [mean.numerator, mean.denominator],
            "p99": [p99.numerator, p99.denominator],
        }
    return out


def _write_summary(path: Path, key: dict, trial_summaries: list[dict]) -> dict:
    doc = {
        "schema": SCHEMA_VERSION,
        "key": key,
        "trials": trial_summaries,
        "aggregates": _aggregate_stats(trial_summaries),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return doc


def run_experiment(config, *, out_dir, seed: Optional[int] = None,
                   trials: Optional[int] = None, parallel: int = 1,
                   trace: bool = False, true_fill: bool = False) -> dict:
    """Run every trial of an experiment and write results.csv plus
    summary.json (and per-trial traces when asked) under ``out_dir``.

    ``config`` is a path or an already-parsed dict.  ``seed`` and
    ``trials`` override the config; the CUPGAMES_SEED environment
    variable sits between the two.  Returns the summary document.
    """
    if isinstance(config, (str, Path)):
        exp = load_config(config)
    else:
        exp = parse_config(config)
    env_seed = os.environ.get("CUPGAMES_SEED")
    if seed is None and env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            raise ConfigError(
                f"CUPGAMES_SEED must be an integer, got {env_seed!r}") from None
    if seed is not None or trials is not None:
        exp = ExperimentConfig(**{
            **exp.__dict__,
            **({"seed": seed} if seed is not None else {}),
            **({"trials": trials} if trials is not None else {}),
        })
    if parallel < 1:
        raise ConfigError("--parallel must be >= 1")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace_dir = str(out) if trace else None

    trial_ids = [exp.trial_offset + i for i in range(exp.trials)]
    jobs = [(exp, t, true_fill, trace_dir) for t in trial_ids]
    if parallel > 1 and len(jobs) > 1:
        with Pool(processes=parallel) as pool:
            results = pool.map(_trial_worker, jobs)
    else:
        results = [_trial_worker(j) for j in jobs]
    results.sort(key=lambda r: r[0])

    with open(out / "results.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "step", "metric", "value_num", "value_den"])
        for _, rows, _ in results:
            w.writerows(rows)

    return _write_summary(out / "summary.json", exp.key(),
                          [s for _, _, s in results])


def aggregate(inputs: Sequence, out_path) -> dict:
    """Merge summary.json files from shards of one experiment.

    Inputs may be summary files or run directories containing one.
    Keys must agree exactly and trial indices must be disjoint; the
    merge is order-independent.
    """
    if not inputs:
        raise ConfigError("aggregate needs at least one summary")
    docs = []
    for item in inputs:
        path = Path(item)
        if path.is_dir():
            path = path / "summary.json"
        try:
            with open(path, "r", encoding="utf-8") as fh:
                docs.append((path, json.load(fh)))
        except OSError as e:
            raise ConfigError(f"cannot read summary: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON: {e}") from None
    key = docs[0][1].get("key")
    trials: dict[int, dict] = {}
    for path, doc in docs:
        if doc.get("schema") != SCHEMA_VERSION:
            raise ConfigError(f"{path}: unsupported schema {doc.get('schema')!r}")
        if doc.get("key") != key:
            raise ConfigError(
                f"{path}: experiment key mismatch, refusing to merge")
        for ts in doc.get("trials", []):
            idx = ts["trial"]
            if idx in trials:
                raise ConfigError(
                    f"{path}: duplicate trial index {idx}; shard with "
                    f"trial_offset to keep indices disjoint")
            trials[idx] = ts
    merged = [trials[i] for i in sorted(trials)]
    return _write_summary(Path(out_path), key, merged)


# ------------------------------------------------------------ oracle report


def oracle_report(seed: int = 0, trials: int = 10_000) -> dict:
    """Run the brute-force cross-checks at CLI scale."""
    from .fillers import BaselineFiller
    from .emptiers import LexScore, ScoreEmptier

    checks = []
    n_inst, mismatches = _oracle.equilibrium_agreement(4, 4)
    checks.append({
        "name": "equilibrium_agreement",
        "instances": n_inst,
        "mismatches": [repr(x) for x in mismatches],
        "passed": not mismatches,
    })

    res = _oracle.crossing_distribution_test(
        BaselineFiller("single_cup"), (1, 1), trials,
        n=8, epsilon=Fraction(3, 5), seed=seed)
    checks.append({"name": "crossing_distribution", **res.report()})

    lex = ScoreEmptier(score=LexScore(rank=(2, 0, 1)))
    violations = _oracle.monotonicity_check(lex, 3, 2)
    checks.append({
        "name": "monotonicity_lex",
        "violations": len(violations),
        "passed": not violations,
    })
    counter = _oracle.monotonicity_check(_oracle.EmptiestSelector(), 3, 2)
    checks.append({
        "name": "monotonicity_counterexample_fails",
        "violations": len(counter),
        "passed": bool(counter),
    })

    return {"passed": all(c["passed"] for c in checks), "checks": checks}


# ------------------------------------------------------------ entry point


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cupgames",
        description="Cup-game experiment harness: run, aggregate, oracle.")
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("--config", required=True, help="experiment JSON")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    run_p.add_argument("--trials", type=int, default=None,
                       help="override the config trial count")
    run_p.add_argument("--parallel", type=int, default=1,
                       help="worker processes (default 1)")
    run_p.add_argument("--trace", action="store_true",
                       help="write per-trial NDJSON traces")
    run_p.add_argument("--true-fill", action="store_true",
                       help="sample metrics on water alone, offsets removed")
    run_p.add_argument("--out", default=".", help="output directory")

    agg_p = sub.add_parser("aggregate", help="merge shard summaries")
    agg_p.add_argument("inputs", nargs="+",
                       help="summary.json files or run directories")
    agg_p.add_argument("--out", required=True, help="merged summary path")

    orc_p = sub.add_parser("oracle", help="brute-force cross-checks")
    orc_p.add_argument("--seed", type=int, default=0)
    orc_p.add_argument("--trials", type=int, default=10_000)
    orc_p.add_argument("--out", default=None, help="report path (default stdout)")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            run_experiment(args.config, out_dir=args.out, seed=args.seed,
                           trials=args.trials, parallel=args.parallel,
                           trace=args.trace, true_fill=args.true_fill)
            return 0
        if args.command == "aggregate":
            aggregate(args.inputs, args.out)
            return 0
        report = oracle_report(seed=args.seed, trials=args.trials)
        text = json.dumps(report, indent=1, sort_keys=True) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0 if report["passed"] else 4
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except CapabilityMismatch as e:
        print(f"capability mismatch: {e}", file=sys.stderr)
        return 3
    except GameError as e:
        print(f"rule violation: {e}", file=sys.stderr)
        return 4
    except ValueError as e:
        print(f"invalid parameters: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
