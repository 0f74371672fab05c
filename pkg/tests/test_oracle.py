"""The brute-force cross-checks themselves get spot checks here.

An oracle nobody has tested is just a second opinion of unknown
quality, so the enumerators are pinned on tiny frozen instances and the
guard rails are exercised.
"""

from fractions import Fraction

import pytest

from cupgames.emptiers import LexScore, ScoreEmptier, equilibrium
from cupgames.engine import CupState
from cupgames.fillers import BaselineFiller, ClairvoyantPkcFiller
from cupgames.oracle import (
    EmptiestSelector,
    crossing_distribution_test,
    enumerate_equilibria,
    equilibrium_agreement,
    monotonicity_check,
)

F = Fraction

LEX = LexScore(rank=(2, 0, 1))


def test_enumeration_finds_the_unique_equilibrium():
    assert enumerate_equilibria(LEX, 3, 2) == [(F(1, 2), F(1), F(1, 2))]
    assert enumerate_equilibria(LEX, 3, 0) == [(F(0), F(0), F(0))]


def test_enumeration_honors_a_tight_cap():
    # the unique equilibrium at m=2 needs a cup at 1; cap 1/2 hides it
    assert enumerate_equilibria(LEX, 3, 2, cap=F(1, 2)) == []


def test_enumeration_guards():
    with pytest.raises(ValueError):
        enumerate_equilibria(LexScore(rank=tuple(range(7))), 7, 1)
    with pytest.raises(ValueError):
        enumerate_equilibria(LEX, 3, 9)
    with pytest.raises(ValueError):
        enumerate_equilibria(LEX, 3, F(1, 3))
    with pytest.raises(ValueError):
        enumerate_equilibria(LEX, 2, 1)  # score covers 3 cups


def test_agreement_sweep_is_clean():
    checked, bad = equilibrium_agreement(3, 3)
    assert checked > 0
    assert bad == []


def test_agreement_counts_every_rank_and_total():
    checked, _ = equilibrium_agreement(2, 1)
    # k in {1, 2}: 1 rank * 3 totals + 2 ranks * 3 totals
    assert checked == 9


# ------------------------------------------------------------ crossing law


def test_crossing_test_guards():
    adaptive = ClairvoyantPkcFiller(k=8, c=1)
    with pytest.raises(ValueError, match="adapts"):
        crossing_distribution_test(adaptive, (1, 4), 10_000, n=16)
    drip = BaselineFiller(variant="single_cup")
    with pytest.raises(ValueError, match="n <= 16"):
        crossing_distribution_test(drip, (1, 4), 10_000, n=17)
    with pytest.raises(ValueError, match="trials"):
        crossing_distribution_test(drip, (1, 4), 9_999, n=4)


def test_integral_water_crosses_exactly():
    # 2/5 per step for five steps puts exactly 2.0 into cup 0, so the
    # law demands exactly two crossings, with zero variance
    drip = BaselineFiller(variant="single_cup")
    res = crossing_distribution_test(drip, (1, 5), 10_000, n=4,
                                     epsilon=F(3, 5), seed=17)
    assert res.passed
    row = res.rows[0]
    assert row.expected == 0.0
    assert row.empirical == 0.0
    assert abs(row.z) == 0.0
    rep = res.report()
    assert rep["passed"] is True
    assert rep["trials"] == 10_000


def test_fractional_water_matches_the_bernoulli_mean():
    # 3 steps * 2/5 = 1.2 into cup 0: one sure crossing plus a 0.2 coin
    drip = BaselineFiller(variant="single_cup")
    res = crossing_distribution_test(drip, (1, 3), 10_000, n=4,
                                     epsilon=F(3, 5), seed=23)
    assert res.passed
    row = res.rows[0]
    assert row.expected == pytest.approx(0.2)
    assert abs(row.empirical - 0.2) < 0.02
    # the untouched cups have nothing to say
    assert all(r.expected == 0.0 for r in res.rows[1:])
    assert res.correlations == ()


def test_crossing_correlations_cover_multiple_cups():
    rr = BaselineFiller(variant="round_robin")
    res = crossing_distribution_test(rr, (1, 3), 10_000, n=4,
                                     epsilon=F(2, 5), seed=31)
    assert res.passed
    informative = [r.cup for r in res.rows if 0.0 < r.expected < 1.0]
    assert len(informative) >= 2
    pairs = {(i, j) for i, j, _ in res.correlations}
    assert pairs  # at least one pair actually tested for independence


# ------------------------------------------------------------ monotonicity


def test_emptiest_selector_picks_the_minimum():
    zeros = (F(0),) * 3
    st = CupState(fills=(F(2), F(1, 2), F(1)), offsets=zeros,
                  priorities=zeros, step=0)
    assert EmptiestSelector().selection(st) == 1


def test_score_emptier_is_monotone():
    emp = ScoreEmptier(score=LEX)
    assert monotonicity_check(emp, 3, 2) == []


def test_single_cup_monotonicity_is_vacuous():
    emp = ScoreEmptier(score=LexScore(rank=(0,)))
    assert monotonicity_check(emp, 1, 3) == []


def test_emptiest_selector_fails_monotonicity():
    violations = monotonicity_check(EmptiestSelector(), 3, 2)
    assert violations
    fills, j, before, after = violations[0]
    assert j != before and after != before
    # the recorded states really do disagree under the selector
    zeros = (F(0),) * 3
    st = CupState(fills=fills, offsets=zeros, priorities=zeros, step=0)
    assert EmptiestSelector().selection(st) == before


def test_monotonicity_guards():
    emp = ScoreEmptier(score=LEX)
    with pytest.raises(ValueError):
        monotonicity_check(emp, 5, 2)
    with pytest.raises(ValueError):
        monotonicity_check(emp, 3, 4)
    with pytest.raises(ValueError):
        monotonicity_check(emp, 3, F(1, 3))
