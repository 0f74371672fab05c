"""Deterministic random streams.

All randomness in a game flows from one 64-bit root seed through named
streams, so any component can be replayed in isolation and trials can be
sharded across processes without coordination.  The generator is
xoshiro256** (public domain reference by Blackman and Vigna), seeded
through splitmix64.  A stream is identified by ``role * 2**32 + index``;
the derivation of a stream seed from (root, stream id) is a fixed odd
multiply followed by one splitmix64 scramble, see :func:`derive_seed`.
"""

from __future__ import annotations

from fractions import Fraction

MASK64 = (1 << 64) - 1

# Stream roles.  Offsets and priorities are the per-cup randomization drawn
# at game start; the filler role feeds a schedule's own choices; the trial
# role turns a root seed into independent per-trial seeds; the score role
# seeds randomized score-function parameters (e.g. a random rank permutation).
ROLE_OFFSETS = 0
ROLE_PRIORITIES = 1
ROLE_FILLER = 2
ROLE_TRIAL = 3
ROLE_SCORE = 4

_GOLDEN = 0x9E3779B97F4A7C15
_DERIVE_MULT = 0xD2B74407B1CE6E93  # odd constant decorrelating stream ids

UNIT_DEN = 1 << 63  # denominator of freshly drawn offsets and priorities


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state once; returns (new_state, output)."""
    state = (state + _GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(root: int, role: int, index: int) -> int:
    """Seed for the stream ``role * 2**32 + index`` under ``root``."""
    if not 0 <= index < (1 << 32):
        raise ValueError(f"stream index out of range: {index}")
    if role < 0:
        raise ValueError(f"stream role out of range: {role}")
    sid = (role << 32) | index
    _, out = splitmix64((root ^ (sid * _DERIVE_MULT)) & MASK64)
    return out


class Stream:
    """xoshiro256** stream with convenience draws used by the simulator."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        x = seed & MASK64
        words = []
        for _ in range(4):
            x, out = splitmix64(x)
            words.append(out)
        if not any(words):  # the all-zero state is the one fixed point
            words[0] = 1
        self.s0, self.s1, self.s2, self.s3 = words

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        x = (s1 * 5) & MASK64
        result = (((x << 7 | x >> 57) & MASK64) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = (s3 << 45 | s3 >> 19) & MASK64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased via rejection."""
        if bound <= 0:
            raise ValueError(f"bound must be positive: {bound}")
        limit = MASK64 - (MASK64 + 1) % bound
        while True:
            x = self.next_u64()
            if x <= limit:
                return x % bound

    def bits63(self) -> int:
        return self.next_u64() >> 1

    def unit_fraction(self) -> Fraction:
        """Uniform rational in [0, 1) drawn as k / 2**63."""
        return Fraction(self.bits63(), UNIT_DEN)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct integers from range(n), ascending."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        if k > n // 2:
            pool = list(range(n))
            self.shuffle(pool)
            return sorted(pool[:k])
        chosen: set[int] = set()
        while len(chosen) < k:
            chosen.add(self.below(n))
        return sorted(chosen)


def stream(root: int, role: int, index: int = 0) -> Stream:
    return Stream(derive_seed(root, role, index))


def trial_seed(root: int, trial: int) -> int:
    """Independent root seed for one trial of an experiment."""
    return stream(root, ROLE_TRIAL, trial).next_u64()
