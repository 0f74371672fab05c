"""Acceptance gate: headline behaviors at full scale, stated tolerances.

Every check prints one [PASS]/[FAIL] line on the real stdout so the
verdicts read off a plain pytest run.  The scales here are the point;
this file takes on the order of twenty minutes, dominated by the
asymmetric emptier endurance runs.
"""

import math
import random
from fractions import Fraction

import pytest

import cupgames.rng as rng
from cupgames.cli import run_experiment
from cupgames.emptiers import (
    AffineScore,
    AsymmetricEmptier,
    GreedyEmptier,
    LexScore,
    ScoreEmptier,
    SmoothedGreedyEmptier,
    emptier_from_descriptor,
)
from cupgames.engine import GameConfig, run_game
from cupgames.fillers import (
    BaselineFiller,
    ClairvoyantPkcFiller,
    FuzzingFiller,
    PkcFiller,
    UnpredictabilityAttackFiller,
    harmonic_fill,
    pkc_step_count,
)
from cupgames.metrics import iter_step_fills, rest_steps, wasted_steps
from cupgames.oracle import (
    EmptiestSelector,
    crossing_distribution_test,
    equilibrium_agreement,
    monotonicity_check,
)

from support import ScriptFiller, random_script

F = Fraction


@pytest.fixture
def announce(capsys):
    def _announce(label, ok, detail=""):
        tag = "PASS" if ok else "FAIL"
        line = f"[{tag}] {label}" + (f" :: {detail}" if detail else "")
        with capsys.disabled():
            print(line, flush=True)
        assert ok, line
    return _announce


# -------------------------------------------------- 1: equilibrium agreement


def test_equilibrium_uniqueness_and_agreement(announce):
    checked, bad = equilibrium_agreement(5, 6)
    announce("equilibrium uniqueness & agreement (k <= 5, m <= 6)",
             checked == 1989 and not bad,
             f"{checked - len(bad)}/{checked} instances clean")


# -------------------------------------------------- 2: crossing distribution


def test_crossing_distribution(announce):
    # 0.4 units into cup 0 each step: crossing frequency must sit within
    # 4 sigma of 0.4 over 10^5 fresh-offset trials
    drip = crossing_distribution_test(
        BaselineFiller(variant="single_cup"), (1, 1), 100_000,
        n=8, epsilon=F(3, 5), seed=260_502)
    freq_row = drip.rows[0]
    # the drip leaves only one informative cup, so cross-cup correlation
    # gets its own spread-out workload at the same scale
    spread = crossing_distribution_test(
        BaselineFiller(variant="round_robin"), (1, 3), 100_000,
        n=8, epsilon=F(2, 5), seed=260_503)
    pairs = len(spread.correlations)
    ok = (drip.passed and spread.passed
          and abs(freq_row.expected - 0.4) < 1e-12 and pairs >= 3)
    announce("crossing distribution (10^5 trials, 4 sigma)",
             ok,
             f"freq {freq_row.empirical:.4f} vs 0.4 (z={freq_row.z:+.2f}), "
             f"{pairs} cup pairs max |z| "
             f"{max(abs(z) for _, _, z in spread.correlations):.2f}")


# -------------------------------------------------- 3: clairvoyant exactness


def test_clairvoyant_pkc_exactness(announce):
    k, c = 64, 2
    t = pkc_step_count(1, k, c)
    target = harmonic_fill(1, k, t)
    cfg = GameConfig(n=64, steps=t, seed=260_504)
    trace = run_game(cfg, ClairvoyantPkcFiller(k=k, c=c), GreedyEmptier(),
                     detail="full")
    fills = trace.final_state().fills
    exact = [j for j in range(64) if fills[j] == target]
    survivors = trace.annotations["survivors"]
    ok = (len(exact) == k - t == 10 and sorted(survivors) == exact)
    announce("clairvoyant (p,k,c) exactness (k=64, c=2, rational equality)",
             ok, f"{len(exact)} cups hold exactly {target}")


# -------------------------------------------------- 4: greedy backlog


def test_greedy_backlog_sanity(announce):
    n, steps = 1024, 1_000_000
    bound = 2 * math.log(n) + 5
    worst = F(0)
    for idx, filler in enumerate([ClairvoyantPkcFiller(k=64, c=2),
                                  BaselineFiller(variant="uniform")]):
        cfg = GameConfig(n=n, steps=steps, seed=rng.trial_seed(260_505, idx))
        trace = run_game(cfg, filler, GreedyEmptier(), detail="stats")
        worst = max(worst, trace.max_backlog)
    announce("greedy backlog sanity (n=1024, 10^6 steps, <= 2 ln n + 5)",
             float(worst) <= bound,
             f"max backlog {float(worst):.3f} vs bound {bound:.3f}")


# -------------------------------------------------- 5 + 6: asymmetric runs


ASYM_N = 4096
ASYM_STEPS = 1_000_000
ASYM_TRIALS = 20
PROBE_STRIDE = 1_000
# ceil(8 * log2(n) * log2(log2(n))) at n = 4096
PROBE_SIZE = math.ceil(8 * math.log2(ASYM_N) * math.log2(math.log2(ASYM_N)))


def _asym_fillers():
    return {
        "uniform": lambda: BaselineFiller(variant="uniform"),
        "pkc": lambda: PkcFiller(k=16, c=2),
        "attack": lambda: UnpredictabilityAttackFiller(
            base=PkcFiller(k=16, c=2), switch_step=ASYM_STEPS // 2,
            R=115, c=3),
    }


@pytest.fixture(scope="module")
def asymmetric_runs():
    """20 trials x 10^6 steps for each of three fillers, shared between
    the tail-bound check and the unpredictability probe."""
    probe = rng.stream(260_506, rng.ROLE_TRIAL).sample_indices(
        ASYM_N, PROBE_SIZE)
    out = {}
    for f_idx, (name, make) in enumerate(sorted(_asym_fillers().items())):
        max_tail = 0
        max_backlog = F(0)
        hits = 0
        samples = 0

        def observe(runner):
            nonlocal hits, samples
            t = runner.t
            if t % PROBE_STRIDE and t != ASYM_STEPS:
                return
            samples += 1
            den = runner.den
            fills = runner.fills
            if all(fills[c] >= den for c in probe):
                hits += 1

        for trial in range(ASYM_TRIALS):
            seed = rng.trial_seed(260_506, f_idx * 1000 + trial)
            cfg = GameConfig(n=ASYM_N, steps=ASYM_STEPS, seed=seed)
            trace = run_game(cfg, make(), AsymmetricEmptier(),
                             observers=(observe,), detail="stats")
            max_tail = max(max_tail, trace.max_tail)
            max_backlog = max(max_backlog, trace.max_backlog)
        out[name] = {"max_tail": max_tail, "max_backlog": max_backlog,
                     "hits": hits, "samples": samples}
    return out


def test_asymmetric_tail_and_backlog(asymmetric_runs, announce):
    lg = math.log2(ASYM_N)
    tail_bound = 8 * lg * math.log2(lg)
    backlog_bound = 8 * math.log2(lg) + 8
    worst_tail = max(r["max_tail"] for r in asymmetric_runs.values())
    worst_backlog = max(r["max_backlog"] for r in asymmetric_runs.values())
    ok = (worst_tail <= tail_bound
          and float(worst_backlog) <= backlog_bound)
    announce("asymmetric tail & backlog (n=4096, 3 fillers x 20 x 10^6)",
             ok,
             f"max tail {worst_tail} vs {tail_bound:.1f}, max backlog "
             f"{float(worst_backlog):.2f} vs {backlog_bound:.2f}")


def test_unpredictability_probe(asymmetric_runs, announce):
    hits = sum(r["hits"] for r in asymmetric_runs.values())
    samples = sum(r["samples"] for r in asymmetric_runs.values())
    announce(f"unpredictability probe (|S|={PROBE_SIZE}, stride 10^3)",
             hits == 0 and samples >= 3 * ASYM_TRIALS * 1000,
             f"fully-queued at {hits}/{samples} sampled steps")


# -------------------------------------------------- 7: rest-step invariant


def test_rest_step_invariant(announce):
    n, steps = 64, 100_000
    eps = F(1, 8)
    window = math.ceil(n / eps) + 1  # 513
    cfg = GameConfig(n=n, steps=steps, seed=260_507, epsilon=eps)
    trace = run_game(cfg, BaselineFiller(variant="uniform"),
                     SmoothedGreedyEmptier(), detail="steps")
    rests = rest_steps(trace)
    gaps = []
    prev = 0
    for t in rests:
        gaps.append(t - prev - 1)  # run of non-rest steps before this rest
        prev = t
    gaps.append(steps - prev)
    violations = sum(1 for g in gaps if g >= window)
    announce("rest-step invariant (eps=1/8, n=64, no 513-step dry window)",
             violations == 0,
             f"{len(rests)} rests, longest dry run {max(gaps)}")


# -------------------------------------------------- 8: queue identity


def test_queue_identity(announce):
    rnd = random.Random(260_508)
    checked = 0
    violations = 0
    while checked < 10_000:
        n = rnd.randint(2, 10)
        steps = rnd.randint(50, 400)
        p = rnd.randint(1, min(3, n))
        script = random_script(rnd, n, p, F(0), steps)
        cfg = GameConfig(n=n, steps=steps, seed=rnd.randrange(2**32), p=p)
        trace = run_game(cfg, ScriptFiller(script), SmoothedGreedyEmptier(),
                         detail="full")
        den = trace.den
        for t, fills in iter_step_fills(trace):
            floors = sum(f // den for f in fills)
            if trace.qsize_per_step[t - 1] != floors:
                violations += 1
        checked += steps
    announce("queue identity |Q| = sum of floored fills (10^4 steps)",
             violations == 0, f"{checked} steps checked")


# -------------------------------------------------- 9: determinism


def test_rerun_determinism(tmp_path, announce):
    cfg = {
        "n": 64, "steps": 2000, "seed": 260_509, "epsilon": "1/8",
        "filler": {"kind": "baseline", "variant": "uniform"},
        "emptier": {"kind": "asymmetric"},
        "trials": 3, "sample_stride": 100,
        "metrics": ["backlog", "tail_size", "queue_size", "rest", "levels"],
    }
    run_experiment(cfg, out_dir=tmp_path / "a")
    run_experiment(cfg, out_dir=tmp_path / "b")
    same_csv = ((tmp_path / "a" / "results.csv").read_bytes()
                == (tmp_path / "b" / "results.csv").read_bytes())
    same_sum = ((tmp_path / "a" / "summary.json").read_bytes()
                == (tmp_path / "b" / "summary.json").read_bytes())
    announce("rerun determinism (byte-identical results.csv)",
             same_csv and same_sum, "results.csv and summary.json match")


# -------------------------------------------------- 10: fuzzing trend


FUZZ_N = 16
FUZZ_L = 100_000
FUZZ_PHASES = 9       # active prefix 16 down to 8
FUZZ_TRIALS = 50


def test_fuzzing_trend(announce):
    wasted_all = []      # per trial: counts for phases 2..9
    prefix_avgs = []     # per trial: prefix average fill at phase ends 1..9
    for trial in range(FUZZ_TRIALS):
        seed = rng.trial_seed(260_510, trial)
        emptier = emptier_from_descriptor(
            {"kind": "score", "score": {"family": "lex", "rank": "random"}},
            FUZZ_N, seed)
        cfg = GameConfig(n=FUZZ_N, steps=FUZZ_PHASES * FUZZ_L, seed=seed,
                         snapshot_stride=FUZZ_L)
        trace = run_game(cfg, FuzzingFiller(phase_len=FUZZ_L), emptier,
                         detail="steps")
        w = wasted_steps(trace)
        wasted_all.append([w[i] for i in range(2, FUZZ_PHASES + 1)])
        perm = trace.annotations["perm"]
        snaps = dict(trace.snapshots)
        den = trace.den
        avgs = []
        for i in range(1, FUZZ_PHASES + 1):
            # the prefix that survives phase i: one label just retired
            prefix = perm[:max(1, FUZZ_N - i)]
            nums = snaps[i * FUZZ_L]
            avgs.append(sum(nums[c] for c in prefix) / (len(prefix) * den))
        prefix_avgs.append(avgs)

    flat = [x for row in wasted_all for x in row]
    wasted_mean = sum(flat) / len(flat)

    # adjacent phase-mean differences, each allowed one standard error
    # of slack below zero
    trend_ok = True
    worst = 0.0
    for i in range(FUZZ_PHASES - 1):
        diffs = [row[i + 1] - row[i] for row in prefix_avgs]
        mean_d = sum(diffs) / len(diffs)
        var = sum((d - mean_d) ** 2 for d in diffs) / (len(diffs) - 1)
        se = (var / len(diffs)) ** 0.5
        worst = min(worst, mean_d + se)
        if mean_d < -se:
            trend_ok = False

    ok = wasted_mean >= 0.1 and trend_ok
    announce("fuzzing trend (50 trials: wasted >= 0.1/phase, fill rising)",
             ok,
             f"wasted mean {wasted_mean:.3f}, worst trend margin "
             f"{worst:+.4f}")


# -------------------------------------------------- 11: monotonicity


def test_score_monotonicity(announce):
    from itertools import permutations

    violations = 0
    domains = 0
    for k in range(1, 5):
        for rank in permutations(range(k)):
            emp = ScoreEmptier(score=LexScore(rank=rank))
            violations += len(monotonicity_check(emp, k, 3))
            domains += 1
    for k in (2, 3, 4):
        coeffs = tuple((F(1), F(j, 8)) for j in range(k))
        emp = ScoreEmptier(score=AffineScore(coeffs=coeffs))
        violations += len(monotonicity_check(emp, k, 3))
        domains += 1
    counterexample = monotonicity_check(EmptiestSelector(), 3, 2)
    ok = violations == 0 and len(counterexample) > 0
    announce("score-emptier monotonicity (k <= 4, cap <= 3, full domain)",
             ok,
             f"{domains} families clean, counterexample produced "
             f"{len(counterexample)} violations")
