"""Emptying strategies.

Every emptier here is a pure function of the visible state.  The
module exposes both the reference selectors (plain functions over
:class:`~cupgames.engine.CupState`, used directly in tests and small
experiments) and spec objects with incremental runtimes that the game
loop uses for long runs.  The two routes are held to bitwise agreement
by the test suite.

Selection families:

* greedy            - the p fullest cups holding at least 1 unit, acting
                      on true fills (offsets are zeroed for it).
* smoothed          - the same rule on bookkeeping fills, i.e. greedy
                      smoothed by the random offsets.
* asymmetric        - smoothed greedy that treats the band [1, 2)
                      specially: cups at fill 2 or more are taken
                      fullest-first, remaining slots go to cups in
                      [1, 2) by larger priority.  Never empties a cup
                      below fill 1.
* score             - single-processor argmax of per-cup strictly
                      increasing score functions, with a separate
                      remove-or-skip rule (default: remove iff the
                      selected cup holds at least 1).
* dynamic_score     - a cyclic timetable of score functions; step t
                      follows entry (t-1) mod len.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappush, heappop, heapify
from typing import Iterable, NamedTuple, Optional, Sequence

from .engine import (
    CupState,
    EmptyDecision,
    EMPTY_DECISION,
    GameError,
    CapabilityMismatch,
    as_fraction,
)
from . import rng as _rng

__all__ = [
    "Threshold",
    "ThresholdQueue",
    "queue_view",
    "greedy_select",
    "smoothed_greedy_select",
    "asymmetric_select",
    "score_select",
    "dynamic_score_select",
    "equilibrium",
    "priority_level",
    "FillNotHalfIntegral",
    "EquilibriumNotFound",
    "ScoreFunction",
    "LexScore",
    "AffineScore",
    "GreedyEmptier",
    "SmoothedGreedyEmptier",
    "AsymmetricEmptier",
    "ScoreEmptier",
    "DynamicScoreEmptier",
    "emptier_from_descriptor",
    "score_from_descriptor",
]


class FillNotHalfIntegral(GameError):
    """Score-based selection asked about a fill off the half-integer grid."""


class EquilibriumNotFound(GameError):
    """The severity-descent got stuck; only pathological score families
    can trigger this (an empty severity cup with nowhere to move from)."""


# ---------------------------------------------------------------- queue


class Threshold(NamedTuple):
    cup: int
    level: int


@dataclass(frozen=True)
class ThresholdQueue:
    """The multiset of crossed thresholds: (j, i) present iff fill_j >= i.

    Level-1 thresholds are the light ones, levels 2 and up are heavy.
    Its size equals the sum of floored fills, which is also the queue
    size the backlog arguments reason about.
    """

    thresholds: tuple[Threshold, ...]

    @property
    def size(self) -> int:
        return len(self.thresholds)

    @property
    def light_count(self) -> int:
        return sum(1 for th in self.thresholds if th.level == 1)

    @property
    def heavy_count(self) -> int:
        return sum(1 for th in self.thresholds if th.level >= 2)

    def __contains__(self, item) -> bool:
        return Threshold(*item) in set(self.thresholds)


def queue_view(state: CupState) -> ThresholdQueue:
    ths = []
    for j, f in enumerate(state.fills):
        depth = f.numerator // f.denominator
        for i in range(1, depth + 1):
            ths.append(Threshold(j, i))
    return ThresholdQueue(tuple(ths))


# ---------------------------------------------------------------- pure selectors


def greedy_select(state: CupState, p: int) -> EmptyDecision:
    """The p fullest cups with fill >= 1; fewer if fewer qualify.
    Ties break toward the lower cup index."""
    qualified = [(-f, j) for j, f in enumerate(state.fills) if f >= 1]
    qualified.sort()
    return EmptyDecision.of(j for _, j in qualified[:p])


def smoothed_greedy_select(state: CupState, p: int) -> EmptyDecision:
    """Greedy on bookkeeping fills.  The smoothing is entirely in the
    state's random offsets; the rule itself is greedy's."""
    return greedy_select(state, p)


def asymmetric_select(state: CupState, p: int) -> EmptyDecision:
    """Fullest-first among cups at 2 or above; remaining slots to cups
    in [1, 2) by larger priority.  Never selects below fill 1."""
    heavy = [(-f, j) for j, f in enumerate(state.fills) if f >= 2]
    heavy.sort()
    picked = [j for _, j in heavy[:p]]
    if len(picked) < p:
        light = [(-state.priorities[j], j)
                 for j, f in enumerate(state.fills) if 1 <= f < 2]
        light.sort()
        picked.extend(j for _, j in light[:p - len(picked)])
    return EmptyDecision.of(picked)


def _check_half_integral(state: CupState) -> None:
    for j, f in enumerate(state.fills):
        if (2 * f).denominator != 1:
            raise FillNotHalfIntegral(
                f"cup {j} holds {f}, not a multiple of 1/2")


def score_select(score: "ScoreFunction", state: CupState,
                 skip_threshold: Fraction = Fraction(1)) -> EmptyDecision:
    """Single-processor score-based move: pick the cup whose score at its
    current fill is largest, then remove iff that cup's fill reaches the
    skip threshold (default 1; a selected cup below 1 means a skip)."""
    if getattr(score, "k", state.n) != state.n:
        raise ValueError(f"score family covers {score.k} cups, state has {state.n}")
    _check_half_integral(state)
    best = max(range(state.n), key=lambda j: score.value(j, state.fills[j]))
    if state.fills[best] >= skip_threshold:
        return EmptyDecision((best,))
    return EMPTY_DECISION


def dynamic_score_select(schedule: Sequence["ScoreFunction"], t: int,
                         state: CupState,
                         skip_threshold: Fraction = Fraction(1)) -> EmptyDecision:
    """Step t (1-based) follows schedule[(t - 1) % len(schedule)]; a
    declared timetable repeats cyclically past its end."""
    if not schedule:
        raise ValueError("dynamic score schedule must be non-empty")
    return score_select(schedule[(t - 1) % len(schedule)], state, skip_threshold)


# ---------------------------------------------------------------- scores


class ScoreFunction:
    """Per-cup strictly increasing fill scores, pairwise distinct on the
    half-integer grid, so argmax selection is always unambiguous."""

    k: int

    def value(self, cup: int, fill: Fraction):
        raise NotImplementedError

    def subset(self, cups: Sequence[int]) -> "ScoreFunction":
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class LexScore(ScoreFunction):
    """Score (fill, rank): greedy with a fixed tie-break permutation.
    ``rank`` must be a permutation of range(k); larger rank wins ties."""

    rank: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "rank", tuple(self.rank))
        if sorted(self.rank) != list(range(len(self.rank))):
            raise ValueError("rank must be a permutation of range(k)")

    @property
    def k(self) -> int:
        return len(self.rank)

    def value(self, cup: int, fill: Fraction):
        return (fill, self.rank[cup])

    def subset(self, cups: Sequence[int]) -> "LexScore":
        order = sorted(range(len(cups)), key=lambda i: self.rank[cups[i]])
        new_rank = [0] * len(cups)
        for pos, i in enumerate(order):
            new_rank[i] = pos
        return LexScore(tuple(new_rank))

    def descriptor(self) -> dict:
        return {"family": "lex", "rank": list(self.rank)}


@dataclass(frozen=True)
class AffineScore(ScoreFunction):
    """Score a_j * fill + b_j with a_j > 0.

    Construction verifies pairwise distinctness over the half-integer
    grid up to ``check_cap`` fills; collisions raise ValueError so a bad
    family never reaches selection.
    """

    coeffs: tuple[tuple[Fraction, Fraction], ...]
    check_cap: int = 64

    def __post_init__(self):
        coeffs = tuple((as_fraction(a), as_fraction(b)) for a, b in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        for j, (a, _) in enumerate(coeffs):
            if a <= 0:
                raise ValueError(f"slope of cup {j} must be positive, got {a}")
        self._validate_distinct()

    def _validate_distinct(self):
        # For cups i != j, a_i * (u/2) + b_i == a_j * (v/2) + b_j must have
        # no solutions with u, v integer in [0, 2 * check_cap].
        top = 2 * self.check_cap
        for i, (ai, bi) in enumerate(self.coeffs):
            for j, (aj, bj) in enumerate(self.coeffs):
                if j <= i:
                    continue
                for v in range(top + 1):
                    u = (aj * Fraction(v, 2) + bj - bi) * 2 / ai
                    if u.denominator == 1 and 0 <= u.numerator <= top:
                        raise ValueError(
                            f"cups {i} and {j} share score "
                            f"{aj * Fraction(v, 2) + bj} at fills "
                            f"{Fraction(u.numerator, 2)} and {Fraction(v, 2)}")

    @property
    def k(self) -> int:
        return len(self.coeffs)

    def value(self, cup: int, fill: Fraction):
        a, b = self.coeffs[cup]
        return a * fill + b

    def subset(self, cups: Sequence[int]) -> "AffineScore":
        return AffineScore(tuple(self.coeffs[c] for c in cups),
                           check_cap=self.check_cap)

    def descriptor(self) -> dict:
        return {"family": "affine",
                "coeffs": [[str(a), str(b)] for a, b in self.coeffs]}


def score_from_descriptor(d: dict, n: int, seed: int,
                          score_index: int = 0) -> ScoreFunction:
    """Build a score function from its config form.  A lex rank given as
    "random" is drawn from the score stream of ``seed`` (sub-stream
    ``score_index`` so a timetable can hold several independent draws)."""
    family = d.get("family")
    if family == "lex":
        rank = d.get("rank")
        if rank == "random":
            perm = list(range(n))
            _rng.stream(seed, _rng.ROLE_SCORE, score_index).shuffle(perm)
            return LexScore(tuple(perm))
        return LexScore(tuple(rank))
    if family == "affine":
        return AffineScore(tuple((as_fraction(a), as_fraction(b))
                                 for a, b in d["coeffs"]),
                           check_cap=int(d.get("check_cap", 64)))
    raise ValueError(f"unknown score family: {family!r}")


# ---------------------------------------------------------------- equilibrium


def equilibrium(score: ScoreFunction, k: int, m) -> tuple[Fraction, ...]:
    """The unique state on k cups with total water m (a multiple of 1/2)
    where wherever the filler adds 1/2, that cup becomes the argmax.

    Found by severity descent: while some other cup j beats cup i's
    score-after-a-half-pour, move 1/2 out of the severity-achieving cup
    into the cheapest such i.  Each move strictly lowers the maximum
    score, so the walk terminates; the end state satisfies the
    equilibrium predicate directly.
    """
    m = as_fraction(m)
    if m < 0 or (2 * m).denominator != 1:
        raise ValueError(f"total water must be a non-negative multiple of 1/2: {m}")
    if score.k != k:
        raise ValueError(f"score family covers {score.k} cups, asked for {k}")
    halves = int(2 * m)
    s2 = [halves // k] * k
    for i in range(halves % k):
        s2[i] += 1

    half = Fraction(1, 2)
    limit = k * (halves + 2) + 8  # distinct severity values bound the walk
    for _ in range(limit):
        vals = [score.value(j, Fraction(s2[j], 2)) for j in range(k)]
        top = max(range(k), key=lambda j: vals[j])
        m1 = vals[top]
        best_i = None
        best_val = None
        for i in range(k):
            if i == top:
                continue
            after = score.value(i, Fraction(s2[i] + 1, 2))
            if after < m1 and (best_val is None or after < best_val):
                best_i = i
                best_val = after
        if best_i is None:
            return tuple(Fraction(v, 2) for v in s2)
        if s2[top] == 0:
            raise EquilibriumNotFound(
                f"severity cup {top} is empty; score family admits no "
                f"equilibrium at m={m}")
        s2[top] -= 1
        s2[best_i] += 1
    raise EquilibriumNotFound("severity descent exceeded its move bound")


def priority_level(priority: Fraction, q: int) -> int:
    """Bucket a priority in [0, 1) into level floor(priority * q) + 1,
    one of 1..q."""
    priority = as_fraction(priority)
    if not 0 <= priority < 1:
        raise ValueError(f"priority must be in [0, 1): {priority}")
    if q < 1:
        raise ValueError(f"level count must be >= 1: {q}")
    scaled = priority * q
    return scaled.numerator // scaled.denominator + 1


# ---------------------------------------------------------------- runtimes


class _GreedyRuntime:
    """Lazy max-heap mirror of greedy_select.

    Stale entries are dropped when they surface; the heap is rebuilt
    outright when pushes outnumber cups 4 to 1, which keeps memory at
    O(n) over arbitrarily long runs.
    """

    tracks_max_fill = True
    __slots__ = ("fills", "den", "p", "heap", "cap")

    def __init__(self, runner):
        self.fills = runner.fills
        self.den = runner.den
        self.p = runner.config.p
        self.cap = max(64, 4 * len(self.fills))
        self._rebuild()

    def _rebuild(self) -> None:
        self.heap = [(-f, c) for c, f in enumerate(self.fills)]
        heapify(self.heap)

    def notify(self, cup: int, old: int, new: int) -> None:
        heappush(self.heap, (-new, cup))
        if len(self.heap) > self.cap:
            self._rebuild()

    def max_fill_num(self) -> int:
        heap = self.heap
        fills = self.fills
        while True:
            negf, c = heap[0]
            if fills[c] == -negf:
                return -negf
            heappop(heap)

    def select(self) -> list[int]:
        heap = self.heap
        fills = self.fills
        den = self.den
        p = self.p
        picked: list[int] = []
        if p == 1:
            while True:
                negf, c = heap[0]
                if fills[c] != -negf:
                    heappop(heap)
                    continue
                if -negf >= den:
                    heappop(heap)
                    picked.append(c)
                return picked
        taken = set()
        while len(picked) < p and heap:
            negf, c = heap[0]
            if fills[c] != -negf:
                heappop(heap)
                continue
            if -negf < den:
                break
            heappop(heap)
            if c in taken:
                continue
            picked.append(c)
            taken.add(c)
        return picked


class _AsymmetricRuntime:
    """Two lazy heaps: all cups by fill, and the [1, 2) band by priority."""

    tracks_max_fill = True
    __slots__ = ("fills", "den", "two_den", "p", "pri", "heap", "light", "cap")

    def __init__(self, runner):
        self.fills = runner.fills
        self.den = runner.den
        self.two_den = 2 * runner.den
        self.p = runner.config.p
        self.pri = runner.priorities_num
        self.cap = max(64, 4 * len(self.fills))
        self._rebuild()

    def _rebuild(self) -> None:
        fills = self.fills
        self.heap = [(-f, c) for c, f in enumerate(fills)]
        heapify(self.heap)
        den, two_den, pri = self.den, self.two_den, self.pri
        self.light = [(-pri[c], c) for c, f in enumerate(fills)
                      if den <= f < two_den]
        heapify(self.light)

    def notify(self, cup: int, old: int, new: int) -> None:
        heappush(self.heap, (-new, cup))
        den = self.den
        two_den = self.two_den
        if den <= new < two_den and not den <= old < two_den:
            heappush(self.light, (-self.pri[cup], cup))
        if len(self.heap) > self.cap or len(self.light) > self.cap:
            self._rebuild()

    def max_fill_num(self) -> int:
        heap = self.heap
        fills = self.fills
        while True:
            negf, c = heap[0]
            if fills[c] == -negf:
                return -negf
            heappop(heap)

    def select(self) -> list[int]:
        heap = self.heap
        fills = self.fills
        den = self.den
        two_den = self.two_den
        p = self.p
        picked: list[int] = []
        taken = set()
        while len(picked) < p and heap:
            negf, c = heap[0]
            if fills[c] != -negf:
                heappop(heap)
                continue
            if -negf < two_den:
                break  # the fullest remaining cup is under 2: band time
            heappop(heap)
            if c in taken:
                continue
            picked.append(c)
            taken.add(c)
        light = self.light
        while len(picked) < p and light:
            negp, c = light[0]
            f = fills[c]
            if not den <= f < two_den or c in taken:
                heappop(light)
                continue
            heappop(light)
            picked.append(c)
            taken.add(c)
        return picked


class _ScoreRuntime:
    """Lazy heap on (score, cup); for the lex family the key is kept as
    plain integers so the fuzzing workloads stay cheap."""

    __slots__ = ("fills", "den", "skip_num", "lex_rank", "coeffs", "heap",
                 "half_den", "tracks_max_fill", "cap")

    def __init__(self, runner, score: ScoreFunction, skip_threshold: Fraction):
        if runner.config.p != 1:
            raise CapabilityMismatch("score-based emptiers are single-processor")
        if score.k != runner.config.n:
            raise ValueError(
                f"score family covers {score.k} cups, game has {runner.config.n}")
        self.fills = runner.fills
        self.den = runner.den
        if runner.den % skip_threshold.denominator:
            raise ValueError(
                f"skip threshold {skip_threshold} does not fit the game "
                f"denominator; use a dyadic rational")
        self.skip_num = skip_threshold.numerator * (
            runner.den // skip_threshold.denominator)
        self.half_den = runner.den // 2  # den always carries the factor 2**63
        self.cap = max(64, 4 * len(self.fills))
        if isinstance(score, LexScore):
            self.lex_rank = score.rank
            self.coeffs = None
            self.tracks_max_fill = True
        else:
            self.lex_rank = None
            self.coeffs = score.coeffs
            self.tracks_max_fill = False
        self._rebuild()

    def _rebuild(self) -> None:
        if self.lex_rank is not None:
            rank = self.lex_rank
            self.heap = [(-f, -rank[c], c) for c, f in enumerate(self.fills)]
        else:
            den = self.den
            self.heap = []
            for c, f in enumerate(self.fills):
                a, b = self.coeffs[c]
                self.heap.append((-(a * Fraction(f, den) + b), c, f))
        heapify(self.heap)

    def notify(self, cup: int, old: int, new: int) -> None:
        if new % self.half_den:
            raise FillNotHalfIntegral(
                f"cup {cup} reached {Fraction(new, self.den)}, not a "
                f"multiple of 1/2; score-based play needs half-unit water")
        if self.lex_rank is not None:
            heappush(self.heap, (-new, -self.lex_rank[cup], cup))
        else:
            a, b = self.coeffs[cup]
            heappush(self.heap, (-(a * Fraction(new, self.den) + b), cup, new))
        if len(self.heap) > self.cap:
            self._rebuild()

    def max_fill_num(self) -> int:
        if self.lex_rank is None:
            raise RuntimeError("max-fill peek is only kept for the lex family")
        heap = self.heap
        fills = self.fills
        while True:
            negf, _, c = heap[0]
            if fills[c] == -negf:
                return -negf
            heappop(heap)

    def select(self) -> list[int]:
        heap = self.heap
        fills = self.fills
        if self.lex_rank is not None:
            while True:
                negf, _, c = heap[0]
                if fills[c] != -negf:
                    heappop(heap)
                    continue
                if -negf >= self.skip_num:
                    heappop(heap)
                    return [c]
                return []
        while True:
            _, c, fnum = heap[0]
            if fills[c] != fnum:
                heappop(heap)
                continue
            if fnum >= self.skip_num:
                heappop(heap)
                return [c]
            return []


class _DynamicRuntime:
    """One sub-runtime per timetable entry; every fill change feeds all of
    them, selection consults the entry for the current step."""

    __slots__ = ("subs", "t", "tracks_max_fill")

    def __init__(self, runner, schedule: Sequence[ScoreFunction],
                 skip_threshold: Fraction):
        self.subs = [_ScoreRuntime(runner, sc, skip_threshold) for sc in schedule]
        self.t = 0
        self.tracks_max_fill = all(s.tracks_max_fill for s in self.subs)

    def notify(self, cup: int, old: int, new: int) -> None:
        for s in self.subs:
            s.notify(cup, old, new)

    def max_fill_num(self) -> int:
        return self.subs[0].max_fill_num()

    def select(self) -> list[int]:
        self.t += 1
        return self.subs[(self.t - 1) % len(self.subs)].select()


# ---------------------------------------------------------------- specs


@dataclass(frozen=True)
class GreedyEmptier:
    """Deterministic greedy; plays on true fills (offsets zeroed)."""

    kind = "greedy"
    uses_offsets = False
    uses_priorities = False
    deterministic = True
    monotone_stateless = True

    def descriptor(self) -> dict:
        return {"kind": self.kind}

    def select(self, state: CupState, p: int) -> EmptyDecision:
        return greedy_select(state, p)

    def runtime(self, runner):
        return _GreedyRuntime(runner)


@dataclass(frozen=True)
class SmoothedGreedyEmptier:
    """Greedy over offset-smoothed bookkeeping fills."""

    kind = "smoothed"
    uses_offsets = True
    uses_priorities = False
    deterministic = False  # behavior depends on hidden offsets
    monotone_stateless = True

    def descriptor(self) -> dict:
        return {"kind": self.kind}

    def select(self, state: CupState, p: int) -> EmptyDecision:
        return smoothed_greedy_select(state, p)

    def runtime(self, runner):
        return _GreedyRuntime(runner)


@dataclass(frozen=True)
class AsymmetricEmptier:
    """Smoothed greedy with priority-ordered treatment of the [1, 2) band."""

    kind = "asymmetric"
    uses_offsets = True
    uses_priorities = True
    deterministic = False
    monotone_stateless = True

    def descriptor(self) -> dict:
        return {"kind": self.kind}

    def select(self, state: CupState, p: int) -> EmptyDecision:
        return asymmetric_select(state, p)

    def runtime(self, runner):
        return _AsymmetricRuntime(runner)


@dataclass(frozen=True)
class ScoreEmptier:
    """Single-processor score-based emptier."""

    score: ScoreFunction
    skip_threshold: Fraction = Fraction(1)

    kind = "score"
    uses_offsets = False
    uses_priorities = False
    deterministic = True
    monotone_stateless = True

    def __post_init__(self):
        object.__setattr__(self, "skip_threshold", as_fraction(self.skip_threshold))
        if self.skip_threshold < 1:
            raise ValueError("a skip threshold below 1 would select cups the "
                             "rules forbid emptying")

    def descriptor(self) -> dict:
        return {"kind": self.kind, "score": self.score.descriptor(),
                "skip_threshold": str(self.skip_threshold)}

    def select(self, state: CupState, p: int) -> EmptyDecision:
        return score_select(self.score, state, self.skip_threshold)

    def selection(self, state: CupState) -> int:
        """Argmax cup before the skip rule; what monotonicity is about."""
        _check_half_integral(state)
        return max(range(state.n),
                   key=lambda j: self.score.value(j, state.fills[j]))

    def runtime(self, runner):
        return _ScoreRuntime(runner, self.score, self.skip_threshold)


@dataclass(frozen=True)
class DynamicScoreEmptier:
    """Cyclic timetable of score-based emptiers."""

    schedule: tuple[ScoreFunction, ...]
    skip_threshold: Fraction = Fraction(1)

    kind = "dynamic_score"
    uses_offsets = False
    uses_priorities = False
    deterministic = True
    monotone_stateless = False  # selection depends on the step, not just state

    def __post_init__(self):
        object.__setattr__(self, "schedule", tuple(self.schedule))
        object.__setattr__(self, "skip_threshold", as_fraction(self.skip_threshold))
        if not self.schedule:
            raise ValueError("dynamic score schedule must be non-empty")
        if self.skip_threshold < 1:
            raise ValueError("a skip threshold below 1 would select cups the "
                             "rules forbid emptying")

    def descriptor(self) -> dict:
        return {"kind": self.kind,
                "schedule": [sc.descriptor() for sc in self.schedule],
                "skip_threshold": str(self.skip_threshold)}

    def select(self, state: CupState, p: int, t: int | None = None) -> EmptyDecision:
        step = state.step + 1 if t is None else t
        return dynamic_score_select(self.schedule, step, state, self.skip_threshold)

    def runtime(self, runner):
        return _DynamicRuntime(runner, self.schedule, self.skip_threshold)


def emptier_from_descriptor(d: dict, n: int, seed: int):
    """Build an emptier spec from its config form."""
    kind = d.get("kind")
    if kind == "greedy":
        return GreedyEmptier()
    if kind == "smoothed":
        return SmoothedGreedyEmptier()
    if kind == "asymmetric":
        return AsymmetricEmptier()
    if kind == "score":
        score = score_from_descriptor(d["score"], n, seed)
        return ScoreEmptier(score=score,
                            skip_threshold=as_fraction(d.get("skip_threshold", 1)))
    if kind == "dynamic_score":
        schedule = tuple(score_from_descriptor(sd, n, seed, score_index=i)
                         for i, sd in enumerate(d["schedule"]))
        return DynamicScoreEmptier(
            schedule=schedule,
            skip_threshold=as_fraction(d.get("skip_threshold", 1)))
    raise ValueError(f"unknown emptier kind: {kind!r}")
