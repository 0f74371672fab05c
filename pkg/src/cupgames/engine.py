"""Game state and the step rule.

A game holds n cups of water.  Each step the filler distributes at most
p * (1 - epsilon) units across the cups (when p > 1 no single cup may
receive more than 1 unit in one step), then the emptier removes exactly
1 unit from each of at most p distinct cups.  A cup may only be selected
while its fill is at least 1, so fills never go negative.

Fills here are bookkeeping fills: cup j starts at a random offset
r_j in [0, 1) drawn with denominator 2**63, so that integer thresholds
are crossed at effectively random points of the true trajectory.  Cups
also carry static priorities in [0, 1) used by tie-breaking emptiers.
Emptiers that consult neither offsets nor priorities get a state whose
offsets are forced to zero, which makes them act on true fills.

All public quantities are exact rationals (``fractions.Fraction``).  The
long-run driver :func:`run_game` keeps fills as integers over one shared
denominator so that a step costs O(touched cups * log n) instead of
O(n); its behavior is defined to be step-for-step identical to chaining
:func:`apply_step`, and the test suite holds it to that.

An optional truncation height h turns the game into one where any fill
above h is cut back by whole units immediately after the emptier moves;
those free removals are logged separately and do not count as emptier
work.  (Whether truncation should instead precede the emptier is left
open; this engine pins it to after, and records enough in the trace to
revisit.)
"""

from __future__ import annotations

import json
import hashlib
from array import array
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappush, heappop
from math import gcd, lcm
from typing import Callable, Iterable, Optional, Sequence

from . import rng as _rng

__all__ = [
    "GameError",
    "RuleViolation",
    "BudgetExceeded",
    "PerCupCapExceeded",
    "NonPositivePlacement",
    "IllegalEmpty",
    "DuplicateCup",
    "CapabilityMismatch",
    "GameConfig",
    "CupState",
    "FillMove",
    "EmptyDecision",
    "GameSetup",
    "Trace",
    "new_game",
    "validate_fill_move",
    "apply_step",
    "fractional_reset",
    "run_game",
    "as_fraction",
]


# ---------------------------------------------------------------- errors


class GameError(Exception):
    """Base for everything this package raises on purpose."""


class RuleViolation(GameError):
    """A move or decision broke the rules of the game.

    Carries ``step`` (1-based, when known), plus ``cup`` / ``amount``
    where they identify the offender.
    """

    def __init__(self, message: str, *, step: int | None = None,
                 cup: int | None = None, amount=None):
        super().__init__(message)
        self.step = step
        self.cup = cup
        self.amount = amount


class BudgetExceeded(RuleViolation):
    pass


class PerCupCapExceeded(RuleViolation):
    pass


class NonPositivePlacement(RuleViolation):
    pass


class IllegalEmpty(RuleViolation):
    pass


class DuplicateCup(RuleViolation):
    pass


class CapabilityMismatch(GameError):
    """Strategy pairing the engine refuses to run.

    Raised when a filler that adapts by simulating the emptier is bound
    to an emptier whose behavior depends on hidden randomization.
    """


# ---------------------------------------------------------------- helpers


def as_fraction(value) -> Fraction:
    """Exact conversion accepting int, str ('1/8', '0'), or Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def _reduced(num: int, den: int) -> list:
    g = gcd(num, den)
    return [num // g, den // g]


# ---------------------------------------------------------------- config


@dataclass(frozen=True)
class GameConfig:
    """Static parameters of one game.

    n: cup count; p: processors (the emptier's per-step removal count
    and the filler's budget multiplier); epsilon: the filler's budget
    slack, budget = p * (1 - epsilon); steps: how many steps run_game
    plays; seed: root of every random stream in the game; truncation_h:
    optional fill height above which water is discarded after the
    emptier moves; snapshot_stride: how often the trace stores a full
    fill vector.
    """

    n: int
    steps: int
    seed: int
    p: int = 1
    epsilon: Fraction = Fraction(0)
    truncation_h: Optional[int] = None
    snapshot_stride: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.p <= self.n:
            raise ValueError(f"p must be in [1, n], got p={self.p} n={self.n}")
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if not 0 <= self.epsilon < 1:
            raise ValueError(f"epsilon must be in [0, 1), got {self.epsilon}")
        if self.truncation_h is not None and self.truncation_h < 1:
            raise ValueError(f"truncation_h must be >= 1, got {self.truncation_h}")
        if self.snapshot_stride < 1:
            raise ValueError(f"snapshot_stride must be >= 1, got {self.snapshot_stride}")

    @property
    def budget(self) -> Fraction:
        return self.p * (1 - self.epsilon)

    def echo(self) -> dict:
        eps = self.epsilon
        return {
            "n": self.n,
            "p": self.p,
            "epsilon": [eps.numerator, eps.denominator],
            "steps": self.steps,
            "seed": self.seed,
            "truncation_h": self.truncation_h,
            "snapshot_stride": self.snapshot_stride,
        }


# ---------------------------------------------------------------- state


@dataclass(frozen=True)
class CupState:
    """Fills plus the static per-cup randomization, after ``step`` steps."""

    fills: tuple[Fraction, ...]
    offsets: tuple[Fraction, ...]
    priorities: tuple[Fraction, ...]
    step: int = 0

    @property
    def n(self) -> int:
        return len(self.fills)

    def true_fills(self) -> tuple[Fraction, ...]:
        """Fills with the random offsets backed out (floored at 0)."""
        zero = Fraction(0)
        return tuple(max(zero, f - r) for f, r in zip(self.fills, self.offsets))


@dataclass(frozen=True)
class FillMove:
    """One step of filler work: cup index -> amount of water (> 0)."""

    placements: dict[int, Fraction]

    def items(self):
        return sorted(self.placements.items())

    def total(self) -> Fraction:
        return sum(self.placements.values(), Fraction(0))


@dataclass(frozen=True)
class EmptyDecision:
    """Cups the emptier removes one unit from this step (may be empty)."""

    cups: tuple[int, ...]

    @classmethod
    def of(cls, cups: Iterable[int]) -> "EmptyDecision":
        return cls(tuple(sorted(cups)))


EMPTY_DECISION = EmptyDecision(())


@dataclass(frozen=True)
class GameSetup:
    """What a fill schedule gets to see when it binds to a game."""

    n: int
    p: int
    epsilon: Fraction
    stream: _rng.Stream
    config: Optional[GameConfig] = None
    emptier: Optional[object] = None  # only simulation-capable schedules look


# ---------------------------------------------------------------- pure ops


def new_game(config: GameConfig, emptier=None) -> CupState:
    """Fresh state: fills equal offsets, priorities drawn independently.

    Both random vectors are always drawn from their streams (so stream
    consumption does not depend on the strategy pairing); offsets are
    then forced to zero for emptiers that declare they use neither
    offsets nor priorities, which makes bookkeeping fills equal true
    fills for them.
    """
    n = config.n
    offs = _rng.stream(config.seed, _rng.ROLE_OFFSETS)
    offsets = tuple(offs.unit_fraction() for _ in range(n))
    pris = _rng.stream(config.seed, _rng.ROLE_PRIORITIES)
    priorities = tuple(pris.unit_fraction() for _ in range(n))
    if emptier is not None and not getattr(emptier, "uses_offsets", True):
        offsets = (Fraction(0),) * n
    return CupState(fills=offsets, offsets=offsets, priorities=priorities, step=0)


def validate_fill_move(move: FillMove, config: GameConfig) -> None:
    """Raise the specific violation, or return None when the move is legal.

    Legal means: every placement strictly positive, total at most
    p * (1 - epsilon), and, only when p > 1, no cup receiving more than
    1 unit.  A move with no placements is legal.
    """
    total = Fraction(0)
    capped = config.p > 1
    for cup, amount in move.placements.items():
        if not 0 <= cup < config.n:
            raise ValueError(f"cup index out of range: {cup}")
        if amount <= 0:
            raise NonPositivePlacement(
                f"placement into cup {cup} must be positive, got {amount}",
                cup=cup, amount=amount)
        if capped and amount > 1:
            raise PerCupCapExceeded(
                f"cup {cup} would receive {amount} > 1 in one step",
                cup=cup, amount=amount)
        total += amount
    if total > config.budget:
        raise BudgetExceeded(
            f"move places {total} > budget {config.budget}", amount=total)


def apply_step(state: CupState, move: FillMove, decision: EmptyDecision,
               config: GameConfig) -> CupState:
    """One full step: fill, then empty, then truncate (if configured).

    The emptier's legality is judged after the fill lands: each selected
    cup must hold at least 1 unit at that point and may appear only
    once.  Truncation repeatedly removes whole units from any cup above
    the configured height; those removals are free and ordered after the
    emptier's.
    """
    validate_fill_move(move, config)
    step = state.step + 1
    fills = list(state.fills)
    for cup, amount in move.placements.items():
        fills[cup] += amount

    cups = decision.cups
    if len(cups) > config.p:
        raise IllegalEmpty(
            f"step {step}: emptier selected {len(cups)} cups with p={config.p}",
            step=step)
    seen = set()
    for cup in cups:
        if cup in seen:
            raise DuplicateCup(f"step {step}: cup {cup} selected twice",
                               step=step, cup=cup)
        seen.add(cup)
        if not 0 <= cup < config.n:
            raise ValueError(f"cup index out of range: {cup}")
        if fills[cup] < 1:
            raise IllegalEmpty(
                f"step {step}: cup {cup} has fill {fills[cup]} < 1",
                step=step, cup=cup)
        fills[cup] -= 1

    if config.truncation_h is not None:
        h = config.truncation_h
        for cup in range(config.n):
            while fills[cup] > h:
                fills[cup] -= 1

    return CupState(fills=tuple(fills), offsets=state.offsets,
                    priorities=state.priorities, step=step)


def fractional_reset(state: CupState) -> CupState:
    """Drop every fill to its fractional part; offsets and priorities stay."""
    fills = tuple(f - (f.numerator // f.denominator) for f in state.fills)
    return CupState(fills=fills, offsets=state.offsets,
                    priorities=state.priorities, step=state.step)


# ---------------------------------------------------------------- trace


_DETAILS = ("full", "steps", "stats")


class Trace:
    """Record of one game.

    Detail levels:
      * ``full``   - per-step moves, emptied cups, backlog, tail, queue
                     size, truncation removals (desk scale; replayable).
      * ``steps``  - per-step emptied cups only (enough for rest-step and
                     wasted-step accounting on long runs).
      * ``stats``  - no per-step records at all.
    Every level keeps the header, periodic fill snapshots, filler phase
    annotations, running maxima, and the final fill vector.  Fills are
    stored as integers over ``den``; accessors return exact rationals.
    """

    def __init__(self, *, config: GameConfig, filler_desc: dict,
                 emptier_desc: dict, detail: str, den: int,
                 offsets_num: tuple, priorities_num: tuple):
        self.config = config
        self.filler_desc = filler_desc
        self.emptier_desc = emptier_desc
        self.detail = detail
        self.den = den
        self.offsets_num = offsets_num          # over den
        self.priorities_num = priorities_num    # over 2**63
        self.steps = 0
        self.emptied: Optional[list] = [] if detail != "stats" else None
        self.emptied_flat: Optional[array] = None  # p=1 compact alternative
        self.moves: Optional[list] = [] if detail == "full" else None
        self.backlog_num: Optional[list] = [] if detail == "full" else None
        self.tail_per_step: Optional[array] = array("q") if detail == "full" else None
        self.qsize_per_step: Optional[array] = array("q") if detail == "full" else None
        self.truncated: Optional[list] = [] if detail == "full" else None
        self.truncated_total = 0
        self.snapshots: list[tuple[int, tuple[int, ...]]] = []
        self.annotations: dict = {}
        self.max_backlog_num = 0
        self.max_tail = 0
        self.max_qsize = 0
        self.final_fills_num: tuple[int, ...] = offsets_num

    # -- accessors ---------------------------------------------------

    def fraction(self, num: int) -> Fraction:
        return Fraction(num, self.den)

    @property
    def max_backlog(self) -> Fraction:
        return Fraction(self.max_backlog_num, self.den)

    def emptied_at(self, t: int) -> tuple[int, ...]:
        """Cups emptied on step t (1-based)."""
        if self.emptied_flat is not None:
            c = self.emptied_flat[t - 1]
            return () if c < 0 else (c,)
        if self.emptied is None:
            raise ValueError("trace was recorded without per-step data")
        return self.emptied[t - 1]

    def rest_flags(self) -> Iterable[bool]:
        """Per step, True when the emptier removed less than one unit."""
        if self.emptied_flat is not None:
            return (c < 0 for c in self.emptied_flat)
        if self.emptied is None:
            raise ValueError("trace was recorded without per-step data")
        return (len(cups) == 0 for cups in self.emptied)

    def move_at(self, t: int) -> FillMove:
        if self.moves is None:
            raise ValueError("trace detail lacks per-step moves")
        placements: dict[int, Fraction] = {}
        for cup, num in self.moves[t - 1]:
            placements[cup] = placements.get(cup, Fraction(0)) + Fraction(num, self.den)
        return FillMove(placements)

    def snapshot_fills(self, idx: int) -> tuple[Fraction, ...]:
        _, nums = self.snapshots[idx]
        den = self.den
        return tuple(Fraction(v, den) for v in nums)

    def final_state(self) -> CupState:
        den = self.den
        return CupState(
            fills=tuple(Fraction(v, den) for v in self.final_fills_num),
            offsets=tuple(Fraction(v, den) for v in self.offsets_num),
            priorities=tuple(Fraction(v, _rng.UNIT_DEN) for v in self.priorities_num),
            step=self.steps)

    # -- serialization -----------------------------------------------

    def _lines(self) -> Iterable[str]:
        den = self.den
        dump = json.dumps
        header = {
            "kind": "header",
            "version": 1,
            "config": self.config.echo(),
            "filler": self.filler_desc,
            "emptier": self.emptier_desc,
            "detail": self.detail,
            "offsets": [_reduced(v, den) for v in self.offsets_num],
            "priorities": [_reduced(v, _rng.UNIT_DEN) for v in self.priorities_num],
        }
        yield dump(header, separators=(",", ":"))
        if self.steps == 0:
            return
        for t in range(1, self.steps + 1):
            rec: dict = {"kind": "step", "t": t}
            if self.moves is not None:
                rec["move"] = [[c, _reduced(v, den)] for c, v in self.moves[t - 1]]
            if self.emptied_flat is not None or self.emptied is not None:
                rec["emptied"] = list(self.emptied_at(t))
            if self.backlog_num is not None:
                rec["backlog"] = _reduced(self.backlog_num[t - 1], den)
                rec["tail"] = self.tail_per_step[t - 1]
                rec["q"] = self.qsize_per_step[t - 1]
            if self.truncated is not None and self.truncated[t - 1]:
                rec["trunc"] = [[c, k] for c, k in self.truncated[t - 1]]
            yield dump(rec, separators=(",", ":"))
        for t, nums in self.snapshots:
            rec = {"kind": "snapshot", "t": t,
                   "fills": [_reduced(v, den) for v in nums]}
            yield dump(rec, separators=(",", ":"))
        if self.annotations:
            yield dump({"kind": "annotations", **self.annotations},
                       separators=(",", ":"))
        footer = {
            "kind": "end",
            "steps": self.steps,
            "max_backlog": _reduced(self.max_backlog_num, den),
            "max_tail": self.max_tail,
            "max_q": self.max_qsize,
            "truncated_total": self.truncated_total,
        }
        yield dump(footer, separators=(",", ":"))

    def to_ndjson(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self._lines():
                fh.write(line)
                fh.write("\n")

    def trace_hash(self) -> str:
        h = hashlib.sha256()
        for line in self._lines():
            h.update(line.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()


# ---------------------------------------------------------------- runner


class _FallbackMaxHeap:
    """Lazy max-heap over (fill, cup) kept by the engine itself when the
    emptier's bookkeeping cannot answer max-fill queries."""

    __slots__ = ("heap", "fills")

    def __init__(self, fills: list[int]):
        self.fills = fills
        self.heap = [(-f, c) for c, f in enumerate(fills)]
        self.heap.sort()

    def push(self, cup: int, num: int) -> None:
        heappush(self.heap, (-num, cup))

    def peek_max(self) -> int:
        heap = self.heap
        fills = self.fills
        while True:
            negf, c = heap[0]
            if fills[c] == -negf:
                return -negf
            heappop(heap)


class _Runner:
    """Integer-scaled game loop.  See the module docstring for the
    contract tying this to apply_step."""

    def __init__(self, config: GameConfig, filler, emptier,
                 observers: Sequence[Callable] = (), detail: str = "full"):
        if detail not in _DETAILS:
            raise ValueError(f"detail must be one of {_DETAILS}, got {detail!r}")
        if not getattr(filler, "oblivious", True) and not getattr(emptier, "deterministic", False):
            raise CapabilityMismatch(
                f"filler {filler.kind!r} simulates its emptier and can only "
                f"run against deterministic emptiers, not {emptier.kind!r}")
        self.config = config
        self.detail = detail
        self.observers = tuple(observers)
        n = config.n

        off_stream = _rng.stream(config.seed, _rng.ROLE_OFFSETS)
        off_bits = [off_stream.bits63() for _ in range(n)]
        pri_stream = _rng.stream(config.seed, _rng.ROLE_PRIORITIES)
        pri_bits = [pri_stream.bits63() for _ in range(n)]
        if not getattr(emptier, "uses_offsets", True):
            off_bits = [0] * n

        eps = config.epsilon
        hint = filler.den_hint(n, config.p, eps)
        den = lcm(_rng.UNIT_DEN, hint, eps.denominator)
        self.den = den
        scale = den // _rng.UNIT_DEN
        self.fills = [b * scale for b in off_bits]
        self.offsets_num = tuple(self.fills)
        self.priorities_num = tuple(pri_bits)
        self.budget_num = config.p * (den - (den * eps.numerator) // eps.denominator)

        self.emptier_spec = emptier
        self.rt = emptier.runtime(self)
        self.fallback_heap = None
        if not getattr(self.rt, "tracks_max_fill", False):
            self.fallback_heap = _FallbackMaxHeap(self.fills)

        self.filler_spec = filler
        setup = GameSetup(n=n, p=config.p, epsilon=eps,
                          stream=_rng.stream(config.seed, _rng.ROLE_FILLER),
                          config=config, emptier=emptier)
        self.filler_run = filler.begin(setup)

        self.qsize = 0
        self.tail = 0
        self.t = 0
        self.emptied_last: tuple[int, ...] = ()
        self.trace = Trace(config=config,
                           filler_desc=filler.descriptor(),
                           emptier_desc=emptier.descriptor(),
                           detail=detail, den=den,
                           offsets_num=self.offsets_num,
                           priorities_num=self.priorities_num)
        if detail == "steps" and config.p == 1:
            self.trace.emptied = None
            self.trace.emptied_flat = array("i")

    def _grow_den(self, new_den_part: int) -> None:
        """Rescale every stored numerator when a placement denominator
        does not divide the current shared denominator.  Rare: schedules
        advertise their denominators up front via den_hint."""
        new_den = lcm(self.den, new_den_part)
        factor = new_den // self.den
        if factor == 1:
            return
        fills = self.fills
        for i, v in enumerate(fills):
            fills[i] = v * factor
        self.den = new_den
        self.offsets_num = tuple(v * factor for v in self.offsets_num)
        self.budget_num *= factor
        self.trace.den = new_den
        self.trace.offsets_num = self.offsets_num
        self.trace.snapshots = [
            (t, tuple(v * factor for v in nums)) for t, nums in self.trace.snapshots]
        if self.trace.backlog_num:
            self.trace.backlog_num = [v * factor for v in self.trace.backlog_num]
        self.trace.max_backlog_num *= factor
        if self.trace.moves:
            self.trace.moves = [
                tuple((c, v * factor) for c, v in mv) for mv in self.trace.moves]
        self.trace.final_fills_num = tuple(v * factor for v in self.trace.final_fills_num)
        self.rt = self.emptier_spec.runtime(self)
        if self.fallback_heap is not None:
            self.fallback_heap = _FallbackMaxHeap(self.fills)

    def run(self) -> Trace:
        config = self.config
        trace = self.trace
        steps = config.steps
        detail = self.detail
        full = detail == "full"
        keep_emptied = detail != "stats"
        flat = trace.emptied_flat is not None
        observers = self.observers
        stride = config.snapshot_stride
        filler_run = self.filler_run
        blocks_at = filler_run.blocks
        p = config.p
        capped = p > 1

        fills = self.fills
        den = self.den
        two_den = 2 * den
        h_num = config.truncation_h * den if config.truncation_h is not None else None
        budget_num = self.budget_num
        rt = self.rt
        notify = rt.notify
        select = rt.select
        rt_max = rt.max_fill_num if getattr(rt, "tracks_max_fill", False) else None
        fb = self.fallback_heap
        qsize = 0
        tail = 0
        max_b = max(fills) if fills else 0
        max_t = 0
        max_q = 0

        if steps == 0:
            trace.final_fills_num = tuple(fills)
            return trace

        self.trace.snapshots.append((0, tuple(fills)))

        for t in range(1, steps + 1):
            raw_blocks = blocks_at(t)

            # Pre-scan: grow the shared denominator if a new one shows up,
            # then scale each block's amount exactly once.
            blocks = []
            total = 0
            for amount, cups in raw_blocks:
                d = amount.denominator
                if den % d:
                    self._grow_den(d)
                    den = self.den
                    two_den = 2 * den
                    h_num = config.truncation_h * den if config.truncation_h is not None else None
                    budget_num = self.budget_num
                    rt = self.rt
                    notify = rt.notify
                    select = rt.select
                    rt_max = rt.max_fill_num if getattr(rt, "tracks_max_fill", False) else None
                    fb = self.fallback_heap
                    blocks = []
                    total = 0
                    for a2, c2 in raw_blocks:  # rescan from scratch
                        anum = a2.numerator * (den // a2.denominator)
                        blocks.append((anum, c2))
                        total += anum * len(c2)
                    break
                anum = amount.numerator * (den // d)
                blocks.append((anum, cups))
                total += anum * len(cups)

            if total > budget_num:
                raise BudgetExceeded(
                    f"step {t}: move places {Fraction(total, den)} > budget "
                    f"{Fraction(budget_num, den)}", step=t, amount=Fraction(total, den))

            per_cup = {} if capped else None
            for anum, cups in blocks:
                if anum <= 0:
                    raise NonPositivePlacement(
                        f"step {t}: non-positive placement", step=t)
                whole = anum == den
                for c in cups:
                    old = fills[c]
                    new = old + anum
                    fills[c] = new
                    notify(c, old, new)
                    if fb is not None:
                        fb.push(c, new)
                    if whole:
                        qsize += 1
                    else:
                        qsize += new // den - old // den
                    if new >= two_den > old:
                        tail += 1
                    if capped:
                        got = per_cup.get(c, 0) + anum
                        if got > den:
                            raise PerCupCapExceeded(
                                f"step {t}: cup {c} received {Fraction(got, den)} > 1",
                                step=t, cup=c, amount=Fraction(got, den))
                        per_cup[c] = got

            sel = select()
            if sel:
                for c in sel:
                    old = fills[c]
                    if old < den:
                        raise IllegalEmpty(
                            f"step {t}: cup {c} selected at fill {Fraction(old, den)} < 1",
                            step=t, cup=c)
                    new = old - den
                    fills[c] = new
                    notify(c, old, new)
                    if fb is not None:
                        fb.push(c, new)
                    qsize -= 1
                    if old >= two_den > new:
                        tail -= 1

            trunc_here = None
            if h_num is not None:
                for anum, cups in blocks:
                    for c in cups:
                        f = fills[c]
                        if f > h_num:
                            units = 0
                            while f > h_num:
                                old = f
                                f -= den
                                notify(c, old, f)
                                if fb is not None:
                                    fb.push(c, f)
                                qsize -= 1
                                if old >= two_den > f:
                                    tail -= 1
                                units += 1
                            fills[c] = f
                            if units:
                                if trunc_here is None:
                                    trunc_here = []
                                trunc_here.append((c, units))
                                trace.truncated_total += units
            b_num = rt_max() if rt_max is not None else fb.peek_max()
            if b_num > max_b:
                max_b = b_num
            if tail > max_t:
                max_t = tail
            if qsize > max_q:
                max_q = qsize

            if keep_emptied:
                if flat:
                    trace.emptied_flat.append(sel[0] if sel else -1)
                else:
                    trace.emptied.append(tuple(sel))
            if full:
                mv = []
                for anum, cups in blocks:
                    for c in cups:
                        mv.append((c, anum))
                trace.moves.append(tuple(mv))
                trace.backlog_num.append(b_num)
                trace.tail_per_step.append(tail)
                trace.qsize_per_step.append(qsize)
                trace.truncated.append(tuple(trunc_here) if trunc_here else ())

            if t % stride == 0 or t == steps:
                trace.snapshots.append((t, tuple(fills)))

            if observers:
                self.t = t
                self.emptied_last = tuple(sel)
                self.qsize = qsize
                self.tail = tail
                self.backlog_num_last = b_num
                for ob in observers:
                    ob(self)

        trace.steps = steps
        trace.max_backlog_num = max_b
        trace.max_tail = max_t
        trace.max_qsize = max_q
        trace.final_fills_num = tuple(fills)
        ann = filler_run.annotations()
        if ann:
            trace.annotations.update(ann)
        self.qsize = qsize
        self.tail = tail
        return trace


def run_game(config: GameConfig, filler, emptier,
             observers: Sequence[Callable] = (), detail: str = "full") -> Trace:
    """Play a full game and return its trace.

    ``filler`` is a fill schedule and ``emptier`` an emptying strategy
    (see the fillers and emptiers modules).  Observers are callables
    invoked after every step with the runner; they must treat it as
    read-only.  ``detail`` picks how much per-step data the trace keeps.
    """
    return _Runner(config, filler, emptier, observers, detail).run()
