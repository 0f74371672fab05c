"""Brute-force cross-checks for the main build, kept deliberately dumb.

Everything here recomputes a quantity the library already provides, but
by exhaustive enumeration or direct Monte-Carlo, on instances small
enough that the slow route is obviously correct.  Guards reject inputs
outside that envelope rather than silently taking hours.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import sqrt

from .engine import CupState, GameConfig, run_game, as_fraction
from .emptiers import LexScore, SmoothedGreedyEmptier, equilibrium
from .metrics import crossing_counts, interval_fill_log
from . import rng as _rng

__all__ = [
    "enumerate_equilibria",
    "equilibrium_agreement",
    "crossing_distribution_test",
    "CrossingTestResult",
    "monotonicity_check",
    "EmptiestSelector",
]


# ------------------------------------------------------------ equilibria


def _half_vectors(k: int, total_halves: int, cap_halves: int):
    """All length-k vectors of half-step counts summing to total_halves,
    entries <= cap_halves, in lexicographic order."""
    if k == 1:
        if total_halves <= cap_halves:
            yield (total_halves,)
        return
    for h in range(min(total_halves, cap_halves) + 1):
        for rest in _half_vectors(k - 1, total_halves - h, cap_halves):
            yield (h,) + rest


def enumerate_equilibria(score, k: int, m, cap=None) -> list[tuple[Fraction, ...]]:
    """All half-integral states over k cups with total m whose every cup
    scores above every other even after a half-unit raise: the defining
    predicate, checked against the complete state list.

    Guarded to k <= 6 and m <= 8; per-cup fills capped at ``cap``
    (default 2m, which cannot exclude an equilibrium since no single
    cup can hold more than the total).
    """
    if k > 6:
        raise ValueError(f"enumeration guard: k <= 6, got {k}")
    m = as_fraction(m)
    if m > 8:
        raise ValueError(f"enumeration guard: m <= 8, got {m}")
    if m < 0 or (2 * m).denominator != 1:
        raise ValueError(f"total must be a nonnegative multiple of 1/2, got {m}")
    if score.k != k:
        raise ValueError(f"score family covers {score.k} cups, asked about {k}")
    cap = 2 * m if cap is None else as_fraction(cap)
    if (2 * cap).denominator != 1:
        raise ValueError(f"cap must be a multiple of 1/2, got {cap}")
    total_halves = (2 * m).numerator
    cap_halves = min((2 * cap).numerator, total_halves)

    half = Fraction(1, 2)
    out = []
    for vec in _half_vectors(k, total_halves, cap_halves):
        fills = tuple(Fraction(h, 2) for h in vec)
        vals = [score.value(j, fills[j]) for j in range(k)]
        plus = [score.value(j, fills[j] + half) for j in range(k)]
        # equilibrium iff vals[j] < plus[i] for every i != j
        lo1 = min(range(k), key=plus.__getitem__)
        second = min((plus[i] for i in range(k) if i != lo1), default=None)
        ok = True
        for j in range(k):
            # min over i != j of plus[i]; None for k == 1 (no pairs at all)
            bound = second if j == lo1 else plus[lo1]
            if bound is not None and not vals[j] < bound:
                ok = False
                break
        if ok:
            out.append(fills)
    return out


def equilibrium_agreement(max_k: int, max_m) -> tuple[int, list]:
    """Check the fast equilibrium finder against exhaustive enumeration
    for every rank order with k <= max_k and every half-step total up to
    max_m.  Returns (instances checked, mismatch descriptions)."""
    from itertools import permutations

    max_m = as_fraction(max_m)
    checked = 0
    bad = []
    for k in range(1, max_k + 1):
        for perm in permutations(range(k)):
            score = LexScore(rank=perm)
            for halves in range((2 * max_m).numerator + 1):
                m = Fraction(halves, 2)
                states = enumerate_equilibria(score, k, m)
                fast = equilibrium(score, k, m)
                checked += 1
                if len(states) != 1:
                    bad.append((perm, m, "count", len(states)))
                elif states[0] != fast:
                    bad.append((perm, m, "mismatch", states[0], fast))
    return checked, bad


# ------------------------------------------------------------ crossings


@dataclass(frozen=True)
class CrossingRow:
    cup: int
    expected: float   # mean fractional part of the cup's interval water
    empirical: float  # mean excess crossings over the floor
    z: float


@dataclass(frozen=True)
class CrossingTestResult:
    trials: int
    interval: tuple[int, int]
    rows: tuple[CrossingRow, ...]
    correlations: tuple[tuple[int, int, float], ...]

    @property
    def passed(self) -> bool:
        return (all(abs(r.z) <= 4 for r in self.rows)
                and all(abs(z) <= 4 for _, _, z in self.correlations))

    def report(self) -> dict:
        return {
            "trials": self.trials,
            "interval": list(self.interval),
            "cups": [{"cup": r.cup, "expected": r.expected,
                      "empirical": r.empirical, "z": r.z} for r in self.rows],
            "correlations": [{"cups": [i, j], "z": z}
                             for i, j, z in self.correlations],
            "passed": self.passed,
        }


def crossing_distribution_test(filler, interval: tuple[int, int], trials: int,
                               *, n: int, p: int = 1, epsilon=0,
                               emptier=None, seed: int = 0) -> CrossingTestResult:
    """Monte-Carlo check of the crossing law: with fresh random offsets,
    a cup receiving c units over an interval crosses floor(c) thresholds
    plus a Bernoulli(frac(c)) extra, independently across cups.

    Runs ``trials`` games with per-trial derived seeds, measures the
    excess crossings, and z-scores each cup's mean against the Bernoulli
    prediction, plus every informative cup pair's sample correlation
    against zero.
    """
    if not getattr(filler, "oblivious", False):
        raise ValueError("the crossing law is about schedules fixed in "
                         "advance; this filler adapts to the emptier")
    if n > 16:
        raise ValueError(f"Monte-Carlo guard: n <= 16, got {n}")
    if trials < 10_000:
        raise ValueError(f"needs trials >= 10^4 for the 4-sigma bands, got {trials}")
    t1, t2 = interval
    if emptier is None:
        # Offsets must stay live: the law is about the uniform random
        # offset sweeping thresholds past the deterministic water level.
        emptier = SmoothedGreedyEmptier()
    epsilon = as_fraction(epsilon)

    sum_x = [0] * n            # excess crossings, exact
    sum_frac = [Fraction(0)] * n
    var_sum = [0.0] * n        # sum of frac*(1-frac)
    resid_dot = [[0.0] * n for _ in range(n)]  # upper triangle i < j
    resid_sq = [0.0] * n

    for trial in range(trials):
        cfg = GameConfig(n=n, steps=t2, seed=_rng.trial_seed(seed, trial),
                         p=p, epsilon=epsilon)
        tr = run_game(cfg, filler, emptier, detail="full")
        log = interval_fill_log(tr, t1, t2)
        counts = crossing_counts(tr, (t1, t2))
        resid = [0.0] * n
        for j in range(n):
            c = log.amounts[j]
            fl = c.numerator // c.denominator
            fr = c - fl
            x = counts[j] - fl
            sum_x[j] += x
            sum_frac[j] += fr
            frf = float(fr)
            var_sum[j] += frf * (1.0 - frf)
            r = x - frf
            resid[j] = r
            resid_sq[j] += r * r
        for i in range(n):
            ri = resid[i]
            if ri:
                row = resid_dot[i]
                for j in range(i + 1, n):
                    row[j] += ri * resid[j]

    rows = []
    for j in range(n):
        exp_mean = float(sum_frac[j]) / trials
        emp_mean = sum_x[j] / trials
        if var_sum[j] > 0:
            z = (sum_x[j] - float(sum_frac[j])) / sqrt(var_sum[j])
        else:
            # no randomness: the count must match exactly
            z = 0.0 if sum_x[j] == sum_frac[j] else float("inf")
        rows.append(CrossingRow(cup=j, expected=exp_mean,
                                empirical=emp_mean, z=z))

    correlations = []
    for i in range(n):
        if resid_sq[i] <= 0:
            continue
        for j in range(i + 1, n):
            if resid_sq[j] <= 0:
                continue
            rho = resid_dot[i][j] / sqrt(resid_sq[i] * resid_sq[j])
            correlations.append((i, j, rho * sqrt(trials)))

    return CrossingTestResult(trials=trials, interval=(t1, t2),
                              rows=tuple(rows),
                              correlations=tuple(correlations))


# ------------------------------------------------------------ monotonicity


class EmptiestSelector:
    """Reference counterexample: always picks the emptiest cup, which is
    exactly the behavior the monotonicity check must flag."""

    def selection(self, state: CupState) -> int:
        fills = state.fills
        return min(range(state.n), key=lambda j: (fills[j], j))


def monotonicity_check(emptier, k: int, cap) -> list:
    """Exhaustively verify that lowering a non-selected cup by 1/2 never
    changes which cup the emptier selects.

    Walks every half-integral fill vector over k cups up to ``cap`` per
    cup (guarded to k <= 4, cap <= 3) and returns the violations as
    (fills, perturbed cup, selection before, selection after); an empty
    list is a pass.
    """
    if k > 4:
        raise ValueError(f"enumeration guard: k <= 4, got {k}")
    cap = as_fraction(cap)
    if cap > 3:
        raise ValueError(f"enumeration guard: cap <= 3, got {cap}")
    if (2 * cap).denominator != 1:
        raise ValueError(f"cap must be a multiple of 1/2, got {cap}")
    cap_halves = (2 * cap).numerator
    zeros = (Fraction(0),) * k
    half = Fraction(1, 2)
    violations = []
    for vec in product(range(cap_halves + 1), repeat=k):
        fills = tuple(Fraction(h, 2) for h in vec)
        state = CupState(fills=fills, offsets=zeros, priorities=zeros, step=0)
        before = emptier.selection(state)
        for j in range(k):
            if j == before or vec[j] == 0:
                continue
            lowered = list(fills)
            lowered[j] -= half
            after = emptier.selection(CupState(
                fills=tuple(lowered), offsets=zeros, priorities=zeros, step=0))
            if after != before:
                violations.append((fills, j, before, after))
    return violations
