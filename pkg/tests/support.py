"""Shared test fixtures: a scripted fill schedule and small reference
implementations used as independent oracles."""

from fractions import Fraction
from math import lcm

from cupgames.engine import GameSetup


class ScriptRun:
    def __init__(self, script):
        self.script = script
        self.phase = (1, 0)

    def blocks(self, t):
        self.phase = (1, t)
        return self.script[t - 1]

    def annotations(self):
        return {}


class ScriptFiller:
    """Plays back a fixed list of per-step block lists, verbatim."""

    kind = "script"
    oblivious = True

    def __init__(self, script, den_hint_value=None):
        self.script = [
            [(Fraction(a), tuple(cups)) for a, cups in step]
            for step in script
        ]
        self._hint = den_hint_value

    def descriptor(self):
        return {"kind": "script", "steps": len(self.script)}

    def den_hint(self, n, p, epsilon):
        if self._hint is not None:
            return self._hint
        dens = [a.denominator for step in self.script for a, _ in step]
        return lcm(*dens) if dens else 1

    def begin(self, setup: GameSetup):
        return ScriptRun(self.script)


def random_script(rnd, n, p, epsilon, steps, max_blocks=2):
    """A legal random script: per step, a few blocks of random rational
    amounts over random distinct cups, total within p(1 - epsilon) and
    per-cup amounts within 1 when p > 1."""
    budget = p * (1 - Fraction(epsilon))
    script = []
    for _ in range(steps):
        blocks = []
        left = budget
        cups_used = set()
        for _ in range(rnd.randint(1, max_blocks)):
            if left <= 0 or len(cups_used) >= n:
                break
            width = rnd.randint(1, min(3, n - len(cups_used)))
            cups = []
            while len(cups) < width:
                c = rnd.randrange(n)
                if c not in cups_used:
                    cups_used.add(c)
                    cups.append(c)
            den = rnd.choice([2, 3, 4, 5, 8])
            cap = min(left / width, Fraction(1)) if p > 1 else left / width
            num = rnd.randint(1, max(1, int(cap * den)))
            amount = Fraction(num, den)
            if amount > cap:
                amount = cap
            if amount <= 0:
                continue
            blocks.append((amount, tuple(sorted(cups))))
            left -= amount * width
        if not blocks:
            blocks = [(min(budget, Fraction(1, 2)), (rnd.randrange(n),))]
        script.append(blocks)
    return script


def brute_greedy(fills, p):
    """Reference emptying choice: the p fullest cups at or above 1,
    lowest index first among ties."""
    order = sorted(range(len(fills)), key=lambda j: (-fills[j], j))
    eligible = [j for j in order if fills[j] >= 1]
    return sorted(eligible[:p])
