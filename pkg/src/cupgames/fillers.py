"""Fill schedules.

A schedule binds to a game through :class:`~cupgames.engine.GameSetup`
and then emits one move per step as a short list of (amount, cups)
blocks, every cup of a block receiving that block's amount.  Schedules
are stateful iterators: the engine calls ``blocks(t)`` exactly once per
step with t = 1, 2, ...  All schedule randomness comes from the setup's
dedicated stream, so an oblivious schedule replays bit-identically no
matter which emptier it faces.

Oblivious schedules see only the step index and their own stream.  The
two simulation-capable schedules (the clairvoyant harmonic strategy and
the clairvoyant tail amplifier) replay the emptier's deterministic
behavior on a private shadow of the game, which is why the engine
refuses to pair them with emptiers that hide randomization.

Finite constructions restart rather than idle: the harmonic strategies
begin a fresh round on a fresh random cup set when one completes, and
the fuzzing schedule stays in its final one-cup phase.  That keeps
long-horizon runs under pressure without a separate driver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

from .engine import (
    FillMove,
    GameSetup,
    GameConfig,
    as_fraction,
)
from . import rng as _rng

__all__ = [
    "PkcFiller",
    "ClairvoyantPkcFiller",
    "TailAmplifierFiller",
    "FuzzingFiller",
    "UnpredictabilityAttackFiller",
    "BaselineFiller",
    "filler_from_descriptor",
    "iterate_moves",
    "harmonic_fill",
    "pkc_step_count",
]


# ------------------------------------------------------------ exp bounds
#
# Step counts are floor expressions in e**(+-c).  To keep them exact and
# platform-independent they are evaluated against dyadic rational bounds
# produced from the Taylor series with a certified tail, tightened until
# the floor/ceil in question is unambiguous (the quantities involved are
# irrational, so this terminates).


def _exp_bounds(c: int, terms: int) -> tuple[Fraction, Fraction]:
    """(lower, upper) rational bounds on e**c for integer c >= 1."""
    s = Fraction(1)
    term = Fraction(1)
    for k in range(1, terms + 1):
        term = term * c / k
        s += term
    nxt = term * c / (terms + 1)
    # Past terms >= 2c the series tail is dominated by a geometric
    # series with ratio <= 1/2, so twice the next term bounds it.
    return s, s + 2 * nxt


def exp_neg_upper_dyadic(c: int, bits: int = 64) -> Fraction:
    """ceil(e**-c * 2**bits) / 2**bits."""
    if c < 1:
        raise ValueError(f"c must be a positive integer, got {c}")
    terms = max(2 * c + 4, 12)
    scale = 1 << bits
    while True:
        lo_e, hi_e = _exp_bounds(c, terms)
        lo, hi = 1 / hi_e, 1 / lo_e
        a = -((-lo.numerator * scale) // lo.denominator)
        b = -((-hi.numerator * scale) // hi.denominator)
        if a == b:
            return Fraction(a, scale)
        terms *= 2


def ceil_c_exp_c(c: int) -> int:
    """ceil(c * e**c) exactly."""
    terms = max(2 * c + 4, 12)
    while True:
        lo_e, hi_e = _exp_bounds(c, terms)
        a = (c * lo_e.numerator) // lo_e.denominator
        b = (c * hi_e.numerator) // hi_e.denominator
        if a == b:
            return a + 1  # c * e**c is irrational, so ceil = floor + 1
        terms *= 2


def _budget_ratio_at_least(k: int, p: int, c: int, target: int) -> bool:
    """Decide k * e**-c >= target * p exactly."""
    terms = max(2 * c + 4, 12)
    while True:
        lo_e, hi_e = _exp_bounds(c, terms)
        if Fraction(k) / hi_e >= target * p:
            return True
        if Fraction(k) / lo_e < target * p:
            return False
        terms *= 2


def pkc_step_count(p: int, k: int, c: int) -> int:
    """Steps the harmonic strategy plays: floor((k/p)(1 - e^-c)) - 1,
    with e^-c replaced by its 64-bit dyadic upper bound."""
    ehat = exp_neg_upper_dyadic(c)
    val = Fraction(k, p) * (1 - ehat)
    return val.numerator // val.denominator - 1


def harmonic_fill(p: int, k: int, steps: int) -> Fraction:
    """Water a never-emptied surviving cup holds after ``steps`` steps:
    sum of p / (k - p*(i-1)) for i = 1..steps."""
    return sum((Fraction(p, k - p * (i - 1)) for i in range(1, steps + 1)),
               Fraction(0))


# ------------------------------------------------------------ shadow game


class _ShadowGame:
    """Private replay of the real game for simulation-capable schedules.

    Mirrors exactly what a deterministic emptier would see: zero
    offsets, the same step order, the same denominators.  Quacks enough
    like the engine's runner for emptier runtimes to bind to it.
    """

    def __init__(self, config: GameConfig, emptier, den: int):
        self.config = config
        self.den = den
        self.fills = [0] * config.n
        self.priorities_num = (0,) * config.n
        self.rt = emptier.runtime(self)

    def pour(self, amount: Fraction, cups: Sequence[int]) -> None:
        anum = amount.numerator * (self.den // amount.denominator)
        fills = self.fills
        notify = self.rt.notify
        for c in cups:
            old = fills[c]
            fills[c] = old + anum
            notify(c, old, old + anum)

    def empty(self) -> list[int]:
        sel = self.rt.select()
        fills = self.fills
        den = self.den
        notify = self.rt.notify
        for c in sel:
            old = fills[c]
            fills[c] = old - den
            notify(c, old, old - den)
        return sel


def _shadow_den(hint: int, epsilon: Fraction) -> int:
    return lcm(_rng.UNIT_DEN, hint, epsilon.denominator)


# ------------------------------------------------------------ harmonic (p,k,c)


class _PkcRunBase:
    """Shared round bookkeeping for the oblivious and clairvoyant
    harmonic strategies."""

    def __init__(self, spec, setup: GameSetup):
        n, p = setup.n, setup.p
        k, c = spec.k, spec.c
        if spec.p is not None and spec.p != p:
            raise ValueError(
                f"schedule was built for p={spec.p}, game has p={p}")
        if not 1 <= k <= n:
            raise ValueError(f"k must be in [1, n]: k={k} n={n}")
        if c < 1:
            raise ValueError(f"c must be a positive integer, got {c}")
        if not _budget_ratio_at_least(k, p, c, 2):
            raise ValueError(
                f"need k / (p * e^c) >= 2; k={k} p={p} c={c} falls short")
        t = pkc_step_count(p, k, c)
        if t < 1:
            raise ValueError(f"degenerate schedule: step count {t}")
        if k - p * t < p:
            raise ValueError(
                f"cup set would underflow: k - p*t = {k - p * t} < p = {p}")
        self.n = n
        self.p = p
        self.k = k
        self.c = c
        self.t_round = t
        self.amounts = [Fraction(p, k - p * (i - 1)) for i in range(1, t + 1)]
        self.stream = setup.stream
        self.round = 0
        self.local = 0
        self.cups: list[int] = []
        self.phase = (0, 0)

    def _next_round(self) -> None:
        self.cups = self.stream.sample_indices(self.n, self.k)
        self.round += 1
        self.local = 0

    def _shrink(self, placed: tuple[int, ...]) -> None:
        raise NotImplementedError

    def blocks(self, t: int):
        if self.round == 0 or self.local == self.t_round:
            self._next_round()
        i = self.local + 1
        placed = tuple(self.cups)
        out = [(self.amounts[i - 1], placed)]
        self._shrink(placed)
        self.local = i
        self.phase = (self.round, i)
        return out

    def annotations(self) -> dict:
        ann = {
            "scheme": self.scheme,
            "k": self.k,
            "c": self.c,
            "round_steps": self.t_round,
            "rounds_started": self.round,
            "round_local_step": self.local,
        }
        if self.local == self.t_round:
            ann["survivors"] = sorted(self.cups)
        return ann


class _PkcRun(_PkcRunBase):
    scheme = "pkc"

    def _shrink(self, placed) -> None:
        # The oblivious strategy discards p uniformly random cups.
        cups = self.cups
        for _ in range(self.p):
            cups.pop(self.stream.below(len(cups)))


class _ClairvoyantPkcRun(_PkcRunBase):
    scheme = "clairvoyant_pkc"

    def __init__(self, spec, setup: GameSetup):
        super().__init__(spec, setup)
        den = _shadow_den(spec.den_hint(setup.n, setup.p, setup.epsilon),
                          setup.epsilon)
        self.shadow = _ShadowGame(setup.config, setup.emptier, den)

    def _shrink(self, placed) -> None:
        # Replay the step on the shadow, then discard exactly the cups
        # the emptier touched inside the current set, padding from the
        # low end so the set shrinks by exactly p.
        i = self.local + 1
        self.shadow.pour(self.amounts[i - 1], placed)
        touched = self.shadow.empty()
        cups = self.cups
        in_set = set(cups)
        drop = [c for c in touched if c in in_set]
        for c in cups:
            if len(drop) == self.p:
                break
            if c not in touched:
                drop.append(c)
        dropset = set(drop)
        self.cups = [c for c in cups if c not in dropset]


@dataclass(frozen=True)
class PkcFiller:
    """Harmonic filling strategy: step i pours p/(k - p(i-1)) into each
    of k - p(i-1) cups, then forgets p random ones.  Restarts on a fresh
    random k-subset when a round completes."""

    k: int
    c: int
    p: Optional[int] = None

    kind = "pkc"
    oblivious = True

    def descriptor(self) -> dict:
        d = {"kind": self.kind, "k": self.k, "c": self.c}
        if self.p is not None:
            d["p"] = self.p
        return d

    def den_hint(self, n: int, p: int, epsilon: Fraction) -> int:
        t = pkc_step_count(p, self.k, self.c)
        return lcm(*[self.k - p * (i - 1) for i in range(1, t + 1)])

    def begin(self, setup: GameSetup):
        return _PkcRun(self, setup)


@dataclass(frozen=True)
class ClairvoyantPkcFiller:
    """Harmonic strategy that discards exactly the cups the (simulated,
    deterministic) emptier touches, so untouched survivors carry the
    exact harmonic fill."""

    k: int
    c: int
    p: Optional[int] = None

    kind = "clairvoyant_pkc"
    oblivious = False

    def descriptor(self) -> dict:
        d = {"kind": self.kind, "k": self.k, "c": self.c}
        if self.p is not None:
            d["p"] = self.p
        return d

    def den_hint(self, n: int, p: int, epsilon: Fraction) -> int:
        t = pkc_step_count(p, self.k, self.c)
        return lcm(*[self.k - p * (i - 1) for i in range(1, t + 1)])

    def begin(self, setup: GameSetup):
        if setup.emptier is None:
            raise ValueError("clairvoyant schedule needs the emptier handle")
        return _ClairvoyantPkcRun(self, setup)


# ------------------------------------------------------------ tail amplifier


class _TailAmplifierRun:
    def __init__(self, spec, setup: GameSetup):
        n, p = setup.n, setup.p
        if p < 2:
            raise ValueError(f"the amplifier needs p >= 2, got p={p}")
        if setup.epsilon != 0:
            raise ValueError("the amplifier pours full units and needs epsilon = 0")
        c1 = as_fraction(spec.c1)
        c = max(2, -((-c1.numerator) // c1.denominator))  # ceil, floored at 2
        K = ceil_c_exp_c(c)
        if n < p + K:
            raise ValueError(
                f"need n >= p + ceil(c*e^c) = {p + K}, got n={n}")
        self.n = n
        self.p = p
        self.c = c
        self.c1 = c1
        self.K = K
        self.t_inner = pkc_step_count(1, K, c)
        if self.t_inner < 1:
            raise ValueError(f"degenerate inner strategy: {self.t_inner} steps")
        self.inner_amounts = [Fraction(1, K - (i - 1))
                              for i in range(1, self.t_inner + 1)]
        self.w_max = n ** (spec.f_degree + 2)
        self.stream = setup.stream
        self.perm = list(range(n))  # label -> physical cup
        self.clairvoyant = spec.clairvoyant
        if self.clairvoyant:
            den = _shadow_den(spec.den_hint(n, p, setup.epsilon), setup.epsilon)
            self.shadow = _ShadowGame(setup.config, setup.emptier, den)
        self.phase_i = 1
        self.w_current = 1 + self.stream.below(self.w_max)
        self.minis_done = 0
        self.inner_local = 0
        self.inner_set: list[int] = []  # labels in [p-1, n)
        self.mini_clean = True  # no emptier touch inside the inner set yet
        self.phases_log: list[dict] = []
        self.phase_start_step = 1
        self.phase = (1, 0)
        self.t_now = 0

    def _start_mini(self) -> None:
        labels = self.stream.sample_indices(self.n - (self.p - 1), self.K)
        self.inner_set = [l + self.p - 1 for l in labels]
        self.inner_local = 0
        self.mini_clean = True

    def _finish_mini(self) -> None:
        self.minis_done += 1
        survivor = min(self.inner_set)
        success = self.mini_clean if self.clairvoyant else None
        if self.minis_done == self.w_current and self.phase_i <= self.p - 1:
            label_a = self.phase_i - 1
            do_swap = success if self.clairvoyant else True
            if do_swap:
                perm = self.perm
                perm[label_a], perm[survivor] = perm[survivor], perm[label_a]
            self.phases_log.append({
                "i": self.phase_i,
                "w": self.w_current,
                "start": self.phase_start_step,
                "end": self.t_now,
                "swap": [label_a, survivor] if do_swap else None,
                "success": success,
            })
            self.phase_i += 1
            self.phase_start_step = self.t_now + 1
            self.minis_done = 0
            if self.phase_i <= self.p - 1:
                self.w_current = 1 + self.stream.below(self.w_max)

    def blocks(self, t: int):
        self.t_now = t
        if self.inner_local == self.t_inner:
            self._finish_mini()
            self._start_mini()
        elif self.inner_local == 0 and not self.inner_set:
            self._start_mini()
        i = self.inner_local + 1
        perm = self.perm
        ones = tuple(perm[l] for l in range(self.p - 1))
        inner_phys = tuple(perm[l] for l in self.inner_set)
        amount = self.inner_amounts[i - 1]
        out = [(Fraction(1), ones), (amount, inner_phys)]

        if self.clairvoyant:
            shadow = self.shadow
            shadow.pour(Fraction(1), ones)
            shadow.pour(amount, inner_phys)
            touched = shadow.empty()
            inner_now = set(inner_phys)
            hit = [c for c in touched if c in inner_now]
            if hit:
                self.mini_clean = False
            # drop exactly one label: a touched one if any, else the lowest
            drop_phys = hit[0] if hit else inner_phys[0]
            drop_label = self.inner_set[inner_phys.index(drop_phys)]
            self.inner_set.remove(drop_label)
        else:
            self.inner_set.pop(self.stream.below(len(self.inner_set)))
        self.inner_local = i
        self.phase = (self.phase_i, self.minis_done * self.t_inner + i)
        return out

    def annotations(self) -> dict:
        return {
            "scheme": "tail_amplifier",
            "c": self.c,
            "K": self.K,
            "t_inner": self.t_inner,
            "clairvoyant": self.clairvoyant,
            "phases": list(self.phases_log),
            "perm": list(self.perm),
        }


@dataclass(frozen=True)
class TailAmplifierFiller:
    """Keeps cups 0..p-2 saturated with a unit each while a one-unit
    harmonic strategy runs on the rest; after a random number of those
    mini-rounds it swaps the phase cup's label with the surviving cup's.
    The oblivious flavor commits the swap to the survivor under its own
    randomness; the clairvoyant flavor simulates the emptier and swaps
    only when the last mini-round verifiably succeeded."""

    c1: Fraction
    f_degree: int = 1
    clairvoyant: bool = False

    oblivious: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "c1", as_fraction(self.c1))
        if self.c1 <= 0:
            raise ValueError(f"target fill must be positive, got {self.c1}")
        if self.f_degree < 0:
            raise ValueError(f"f_degree must be >= 0, got {self.f_degree}")
        object.__setattr__(self, "oblivious", not self.clairvoyant)

    kind = "tail_amplifier"

    def descriptor(self) -> dict:
        return {"kind": self.kind, "c1": str(self.c1),
                "f_degree": self.f_degree, "clairvoyant": self.clairvoyant}

    def _c_and_k(self) -> tuple[int, int]:
        c = max(2, -((-self.c1.numerator) // self.c1.denominator))
        return c, ceil_c_exp_c(c)

    def den_hint(self, n: int, p: int, epsilon: Fraction) -> int:
        c, K = self._c_and_k()
        t = pkc_step_count(1, K, c)
        return lcm(*[K - (i - 1) for i in range(1, t + 1)])

    def begin(self, setup: GameSetup):
        if self.clairvoyant and setup.emptier is None:
            raise ValueError("clairvoyant schedule needs the emptier handle")
        return _TailAmplifierRun(self, setup)


# ------------------------------------------------------------ fuzzing


class _FuzzingRun:
    def __init__(self, spec, setup: GameSetup):
        if setup.p != 1:
            raise ValueError("the fuzzing schedule is single-processor")
        unit = spec.unit
        if unit is None:
            unit = (1 - setup.epsilon) / 2
        unit = as_fraction(unit)
        if 2 * unit > 1 - setup.epsilon:
            raise ValueError(
                f"unit {unit} breaks the budget 1 - epsilon = {1 - setup.epsilon}")
        self.n = setup.n
        self.unit = unit
        self.double_unit = 2 * unit
        self.phase_len = spec.phase_len
        self.stream = setup.stream
        self.perm = list(range(setup.n))
        self.stream.shuffle(self.perm)
        self.cur_phase = 0
        self.active = setup.n
        self.phases_log: list[dict] = []
        self.phase = (0, 0)

    def blocks(self, t: int):
        L = self.phase_len
        i = (t - 1) // L + 1
        if i != self.cur_phase:
            self.cur_phase = i
            self.active = max(1, self.n - i + 1)
            self.phases_log.append({
                "i": i,
                "active": self.active,
                "start": (i - 1) * L + 1,
                "end": i * L,
            })
        ell = self.active
        a = self.stream.below(ell)
        b = self.stream.below(ell)
        c1 = self.perm[a]
        c2 = self.perm[b]
        self.phase = (i, (t - 1) % L + 1)
        if c1 == c2:
            return [(self.double_unit, (c1,))]
        return [(self.unit, (c1, c2))]

    def annotations(self) -> dict:
        return {
            "scheme": "fuzzing",
            "perm": list(self.perm),
            "phase_len": self.phase_len,
            "unit": [self.unit.numerator, self.unit.denominator],
            "phases": list(self.phases_log),
        }


@dataclass(frozen=True)
class FuzzingFiller:
    """Random-pair pouring over a shrinking prefix of randomly relabeled
    cups: phase i plays phase_len steps on the first n - i + 1 labels,
    each step pouring ``unit`` into two independent uniform picks (the
    same pick twice lands a double dose).  unit defaults to (1-eps)/2."""

    phase_len: int
    unit: Optional[Fraction] = None

    kind = "fuzzing"
    oblivious = True

    def __post_init__(self):
        if self.phase_len < 1:
            raise ValueError(f"phase_len must be >= 1, got {self.phase_len}")
        if self.unit is not None:
            object.__setattr__(self, "unit", as_fraction(self.unit))
            if self.unit <= 0:
                raise ValueError(f"unit must be positive, got {self.unit}")

    def descriptor(self) -> dict:
        return {"kind": self.kind, "phase_len": self.phase_len,
                "unit": "auto" if self.unit is None else str(self.unit)}

    def den_hint(self, n: int, p: int, epsilon: Fraction) -> int:
        unit = (1 - epsilon) / 2 if self.unit is None else self.unit
        return lcm(unit.denominator, 2)

    def begin(self, setup: GameSetup):
        return _FuzzingRun(self, setup)


# ------------------------------------------------------------ probe attack


class _AttackRun:
    def __init__(self, spec, setup: GameSetup):
        if setup.epsilon != 0:
            raise ValueError("the probe suffix pours full units and needs epsilon = 0")
        cR = spec.c * spec.R
        if cR > setup.n:
            raise ValueError(f"probe set needs c*R = {cR} <= n = {setup.n}")
        self.p = setup.p
        self.cR = cR
        self.switch = spec.switch_step
        self.suffix_len = -((-cR) // setup.p)  # ceil(cR / p)
        self.base = spec.base.begin(setup)
        self.phase = (0, 0)

    def blocks(self, t: int):
        if t <= self.switch:
            out = self.base.blocks(t)
            self.phase = self.base.phase
            return out
        s = t - self.switch
        if s <= self.suffix_len:
            lo = (s - 1) * self.p
            hi = min(s * self.p, self.cR)
            self.phase = ("probe", s)
            return [(Fraction(1), tuple(range(lo, hi)))]
        out = self.base.blocks(t)
        self.phase = self.base.phase
        return out

    def annotations(self) -> dict:
        ann = dict(self.base.annotations())
        ann["probe"] = {"cups": list(range(self.cR)),
                        "step": self.switch + self.suffix_len}
        return ann


@dataclass(frozen=True)
class UnpredictabilityAttackFiller:
    """Plays ``base`` through ``switch_step``, then spends ceil(cR/p)
    steps pouring one unit into each of cups 0..cR-1 (p fresh cups per
    step, fewer on the last), annotating that probe set and the step it
    completes; afterwards base play resumes."""

    base: object
    switch_step: int
    R: int
    c: int

    kind = "unpredictability_attack"

    def __post_init__(self):
        if self.switch_step < 0:
            raise ValueError(f"switch_step must be >= 0, got {self.switch_step}")
        if self.R < 1 or self.c < 1:
            raise ValueError(f"R and c must be positive, got R={self.R} c={self.c}")

    @property
    def oblivious(self) -> bool:
        return self.base.oblivious

    def descriptor(self) -> dict:
        return {"kind": self.kind, "base": self.base.descriptor(),
                "switch_step": self.switch_step, "R": self.R, "c": self.c}

    def den_hint(self, n: int, p: int, epsilon: Fraction) -> int:
        return self.base.den_hint(n, p, epsilon)

    def begin(self, setup: GameSetup):
        return _AttackRun(self, setup)


# ------------------------------------------------------------ baselines


class _BaselineRun:
    def __init__(self, spec, setup: GameSetup):
        self.variant = spec.variant
        self.n = setup.n
        self.p = setup.p
        self.stream = setup.stream
        self.per_cup = 1 - setup.epsilon
        if self.variant == "single_cup":
            self.amount = min(Fraction(1), setup.p * (1 - setup.epsilon))
        self.rr_next = 0
        self.phase = (1, 0)

    def blocks(self, t: int):
        self.phase = (1, t)
        if self.variant == "uniform":
            cups = tuple(self.stream.sample_indices(self.n, self.p))
            return [(self.per_cup, cups)]
        if self.variant == "single_cup":
            return [(self.amount, (0,))]
        # round_robin
        start = self.rr_next
        cups = tuple((start + i) % self.n for i in range(self.p))
        self.rr_next = (start + self.p) % self.n
        return [(self.per_cup, cups)]

    def annotations(self) -> dict:
        return {"scheme": "baseline", "variant": self.variant}


_BASELINE_VARIANTS = ("uniform", "single_cup", "round_robin")


@dataclass(frozen=True)
class BaselineFiller:
    """Unstructured pressure: ``uniform`` pours 1 - epsilon into p random
    distinct cups; ``single_cup`` pours min(1, p(1-eps)) into cup 0;
    ``round_robin`` walks the cups cyclically p at a time."""

    variant: str = "uniform"

    kind = "baseline"
    oblivious = True

    def __post_init__(self):
        if self.variant not in _BASELINE_VARIANTS:
            raise ValueError(f"unknown baseline variant: {self.variant!r}")

    def descriptor(self) -> dict:
        return {"kind": self.kind, "variant": self.variant}

    def den_hint(self, n: int, p: int, epsilon: Fraction) -> int:
        return epsilon.denominator

    def begin(self, setup: GameSetup):
        return _BaselineRun(self, setup)


# ------------------------------------------------------------ plumbing


def filler_from_descriptor(d: dict):
    """Build a fill schedule from its config form."""
    kind = d.get("kind")
    if kind == "pkc":
        return PkcFiller(k=int(d["k"]), c=int(d["c"]),
                         p=int(d["p"]) if "p" in d else None)
    if kind == "clairvoyant_pkc":
        return ClairvoyantPkcFiller(k=int(d["k"]), c=int(d["c"]),
                                    p=int(d["p"]) if "p" in d else None)
    if kind == "tail_amplifier":
        return TailAmplifierFiller(c1=as_fraction(d["c1"]),
                                   f_degree=int(d.get("f_degree", 1)),
                                   clairvoyant=bool(d.get("clairvoyant", False)))
    if kind == "fuzzing":
        unit = d.get("unit", "auto")
        return FuzzingFiller(phase_len=int(d["phase_len"]),
                             unit=None if unit == "auto" else as_fraction(unit))
    if kind == "unpredictability_attack":
        return UnpredictabilityAttackFiller(
            base=filler_from_descriptor(d["base"]),
            switch_step=int(d["switch_step"]), R=int(d["R"]), c=int(d["c"]))
    if kind == "baseline":
        return BaselineFiller(variant=d.get("variant", "uniform"))
    raise ValueError(f"unknown filler kind: {kind!r}")


def iterate_moves(filler, n: int, steps: int, *, p: int = 1,
                  epsilon=0, seed: int = 0, config: GameConfig | None = None,
                  emptier=None) -> Iterable[FillMove]:
    """Reference-path adapter: the schedule's moves as FillMove values.

    Builds the same setup the engine would (same stream role), so a
    schedule iterated here emits exactly what it would emit in a run
    with the same seed.
    """
    epsilon = as_fraction(epsilon)
    if config is None:
        config = GameConfig(n=n, steps=steps, seed=seed, p=p, epsilon=epsilon)
    setup = GameSetup(n=n, p=p, epsilon=epsilon,
                      stream=_rng.stream(seed, _rng.ROLE_FILLER),
                      config=config, emptier=emptier)
    run = filler.begin(setup)
    for t in range(1, steps + 1):
        placements: dict[int, Fraction] = {}
        for amount, cups in run.blocks(t):
            for c in cups:
                placements[c] = placements.get(c, Fraction(0)) + amount
        yield FillMove(placements)
