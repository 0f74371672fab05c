"""Measured quantities: backlog, tail size, shifted norms, influence,
threshold crossings, queue census, rest and wasted steps, bolus and
variation against the score equilibrium.

State-valued metrics read the bookkeeping fills by default, offsets
included; every such function takes ``true_fill=True`` to measure the
water alone instead.  Trace-valued metrics replay the recorded moves,
so they need the trace detail that carries what they count (crossings
need ``full``, rest and wasted steps are fine with ``steps``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log2
from typing import Iterable, Iterator, Optional, Sequence

from .engine import CupState, Trace, as_fraction
from .emptiers import FillNotHalfIntegral, equilibrium, priority_level

__all__ = [
    "backlog",
    "tail_size",
    "shifted_lp_norm",
    "IntervalFillLog",
    "interval_fill_log",
    "influence",
    "crossing_count",
    "crossing_counts",
    "queued_by_level",
    "default_census_levels",
    "fully_queued",
    "rest_steps",
    "wasted_steps",
    "bolus_and_variation",
    "iter_step_fills",
    "MetricSeries",
]


def _fills(state: CupState, true_fill: bool) -> Sequence[Fraction]:
    if not true_fill:
        return state.fills
    return tuple(max(Fraction(0), f) for f in state.true_fills())


def backlog(state: CupState, *, true_fill: bool = False) -> Fraction:
    """Fill of the fullest cup."""
    fills = _fills(state, true_fill)
    return max(fills) if fills else Fraction(0)


def tail_size(state: CupState, c=2, *, true_fill: bool = False) -> int:
    """How many cups hold at least c units (inclusive)."""
    c = as_fraction(c)
    if c < 1:
        raise ValueError(f"tail threshold must be >= 1, got {c}")
    return sum(1 for f in _fills(state, true_fill) if f >= c)


def shifted_lp_norm(state: CupState, c, p_exp, *, true_fill: bool = False):
    """(sum of max(fill - c, 0)^p_exp)^(1/p_exp); exact for p_exp 1 and
    infinity, a float otherwise."""
    c = as_fraction(c)
    if c < 0:
        raise ValueError(f"shift must be >= 0, got {c}")
    fills = _fills(state, true_fill)
    excess = [f - c for f in fills if f > c]
    if p_exp == 1:
        return sum(excess, Fraction(0))
    if p_exp == float("inf"):
        return max(excess, default=Fraction(0))
    if not (isinstance(p_exp, int) and p_exp >= 1):
        raise ValueError(f"norm order must be a positive integer or inf, got {p_exp}")
    return float(sum(x ** p_exp for x in excess)) ** (1 / p_exp)


# ------------------------------------------------------------ intervals


@dataclass(frozen=True)
class IntervalFillLog:
    """Per-cup water placed during the step interval [t1, t2], both ends
    inclusive.  Adjacent logs add."""

    t1: int
    t2: int
    amounts: tuple[Fraction, ...]

    def __add__(self, other: "IntervalFillLog") -> "IntervalFillLog":
        if other.t1 != self.t2 + 1:
            raise ValueError(
                f"intervals not adjacent: [{self.t1},{self.t2}] + "
                f"[{other.t1},{other.t2}]")
        if len(other.amounts) != len(self.amounts):
            raise ValueError("cup counts differ")
        return IntervalFillLog(
            self.t1, other.t2,
            tuple(a + b for a, b in zip(self.amounts, other.amounts)))


def _check_interval(trace: Trace, t1: int, t2: int) -> None:
    if not 1 <= t1 <= t2 <= trace.steps:
        raise ValueError(
            f"interval [{t1}, {t2}] out of range for a {trace.steps}-step trace")


def interval_fill_log(trace: Trace, t1: int, t2: int) -> IntervalFillLog:
    _check_interval(trace, t1, t2)
    if trace.moves is None:
        raise ValueError("fill log needs a full-detail trace")
    n = trace.config.n
    den = trace.den
    nums = [0] * n
    for t in range(t1, t2 + 1):
        for c, anum in trace.moves[t - 1]:
            nums[c] += anum
    return IntervalFillLog(t1, t2, tuple(Fraction(v, den) for v in nums))


def influence(log: IntervalFillLog) -> Fraction:
    """Sum over cups of min(1, water placed)."""
    one = Fraction(1)
    return sum((a if a < one else one for a in log.amounts), Fraction(0))


# ------------------------------------------------------------ replay


def iter_step_fills(trace: Trace) -> Iterator[tuple[int, list[int]]]:
    """Replay a full-detail trace, yielding (t, fills) after each step.

    Fills are integer numerators over ``trace.den`` and the list is
    reused between yields; copy it to keep a snapshot.
    """
    if trace.moves is None:
        raise ValueError("replay needs a full-detail trace")
    fills = list(trace.offsets_num)
    den = trace.den
    for t in range(1, trace.steps + 1):
        for c, anum in trace.moves[t - 1]:
            fills[c] += anum
        for c in trace.emptied_at(t):
            fills[c] -= den
        for c, units in trace.truncated[t - 1]:
            fills[c] -= units * den
        yield t, fills


def crossing_counts(trace: Trace, interval: tuple[int, int]) -> list[int]:
    """Per-cup count of upward integer-threshold crossings during the
    interval: events where a pour lifted the fill from below some
    integer i to at least i.  A threshold recounts if the fill drops
    back below it and crosses again."""
    t1, t2 = interval
    _check_interval(trace, t1, t2)
    if trace.moves is None:
        raise ValueError("crossing counts need a full-detail trace")
    den = trace.den
    fills = list(trace.offsets_num)
    counts = [0] * trace.config.n
    step_add: dict[int, int] = {}
    for t in range(1, t2 + 1):
        count_here = t >= t1
        step_add.clear()
        for c, anum in trace.moves[t - 1]:
            step_add[c] = step_add.get(c, 0) + anum
        for c, add in step_add.items():
            old = fills[c]
            new = old + add
            fills[c] = new
            if count_here:
                counts[c] += new // den - old // den
        for c in trace.emptied_at(t):
            fills[c] -= den
        for c, units in trace.truncated[t - 1]:
            fills[c] -= units * den
    return counts


def crossing_count(trace: Trace, interval: tuple[int, int], cup: int) -> int:
    if not 0 <= cup < trace.config.n:
        raise ValueError(f"cup index out of range: {cup}")
    return crossing_counts(trace, interval)[cup]


# ------------------------------------------------------------ queue census


def default_census_levels(n: int) -> int:
    """Default level count q = max(2, 4 * ceil(log2 log2 n))."""
    if n < 3:
        return 2
    return max(2, 4 * ceil(log2(log2(n))))


def queued_by_level(state: CupState, q: Optional[int] = None) -> list[int]:
    """Counts of queued cups (fill >= 1) per priority level 1..q."""
    if q is None:
        q = default_census_levels(state.n)
    if q < 1:
        raise ValueError(f"level count must be >= 1, got {q}")
    counts = [0] * q
    for f, pri in zip(state.fills, state.priorities):
        if f >= 1:
            counts[priority_level(pri, q) - 1] += 1
    return counts


def fully_queued(state: CupState, cups: Iterable[int]) -> bool:
    """True when every listed cup holds at least one unit (vacuously
    true for the empty set)."""
    fills = state.fills
    return all(fills[c] >= 1 for c in cups)


# ------------------------------------------------------------ step classes


def rest_steps(trace: Trace) -> list[int]:
    """Steps where the emptier removed less than one unit of water.
    Meaningful for single-processor traces; with p = 1 that is exactly
    the steps with no removal."""
    return [t for t, rest in enumerate(trace.rest_flags(), 1) if rest]


def wasted_steps(trace: Trace, annotations: Optional[dict] = None) -> dict[int, int]:
    """Per-phase counts of steps where the emptier removed nothing from
    the active prefix (skips included).

    The prefix lives in the fuzzing schedule's label space: during the
    phase with ``active`` = L labels, the watched cups are the physical
    cups behind labels 0..L-1.  Needs the schedule's phase annotations,
    taken from the trace unless passed explicitly.
    """
    ann = annotations if annotations is not None else trace.annotations
    if not ann or ann.get("scheme") != "fuzzing" or "phases" not in ann:
        raise ValueError("trace lacks fuzzing phase annotations")
    perm = ann["perm"]
    out: dict[int, int] = {}
    for ph in ann["phases"]:
        active = ph["active"]
        prefix = set(perm[:active])
        count = 0
        last = min(ph["end"], trace.steps)
        for t in range(ph["start"], last + 1):
            for c in trace.emptied_at(t):
                if c in prefix:
                    break
            else:
                count += 1
        out[ph["i"]] = count
    return out


# ------------------------------------------------------------ bolus


def bolus_and_variation(state: CupState, score, ell: int
                        ) -> tuple[Fraction, Fraction, Fraction, tuple[Fraction, ...]]:
    """Distance of cups 0..ell from their score equilibrium.

    Measures the first ell+1 cups of the state (callers running a
    relabeling schedule pass a state already expressed in label order).
    With m their total water, E the equilibrium of the score over ell+1
    cups at total m+1:

      bolus     b = max(0, fill[ell] - E[ell])
      variation v = sum over j <= ell of |fill[j] - E[j]|

    Returns (b, v, m, E).  Fills must be half-integral.
    """
    k = ell + 1
    if not 1 <= k <= state.n:
        raise ValueError(f"prefix length {k} out of range for n={state.n}")
    fills = state.fills[:k]
    for j, f in enumerate(fills):
        if (2 * f).denominator != 1:
            raise FillNotHalfIntegral(
                f"cup {j} holds {f}, not a multiple of 1/2")
    if score.k < k:
        raise ValueError(f"score family covers {score.k} cups, need {k}")
    if score.k > k:
        score = score.subset(tuple(range(k)))
    m = sum(fills, Fraction(0))
    eq = equilibrium(score, k, m + 1)
    b = max(Fraction(0), fills[ell] - eq[ell])
    v = sum((abs(f - e) for f, e in zip(fills, eq)), Fraction(0))
    return b, v, m, eq


# ------------------------------------------------------------ series


class MetricSeries:
    """Step-indexed samples of named metrics, steps strictly increasing."""

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        self.steps: list[int] = []
        self.samples: list[tuple] = []

    def append(self, step: int, values: Sequence) -> None:
        if self.steps and step <= self.steps[-1]:
            raise ValueError(
                f"sample steps must be strictly increasing: {step} after "
                f"{self.steps[-1]}")
        if len(values) != len(self.names):
            raise ValueError(
                f"expected {len(self.names)} values, got {len(values)}")
        self.steps.append(step)
        self.samples.append(tuple(values))

    def __len__(self) -> int:
        return len(self.steps)

    def rows(self) -> Iterator[tuple[int, str, object]]:
        """Long-form (step, metric name, value) rows."""
        for step, sample in zip(self.steps, self.samples):
            for name, value in zip(self.names, sample):
                yield step, name, value
