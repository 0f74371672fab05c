"""Cup games: a filler pours water into n cups under a per-step budget,
an emptier removes it, and the contest is over how high the water can
be pushed.  This package simulates those games exactly (all arithmetic
rational), implements the emptying strategies and adversarial fill
schedules under study, measures the quantities the analyses bound, and
batches it all behind a reproducible experiment harness.

Quick tour:

    from cupgames import GameConfig, run_game
    from cupgames.fillers import BaselineFiller
    from cupgames.emptiers import GreedyEmptier

    trace = run_game(GameConfig(n=8, steps=1000, seed=7),
                     BaselineFiller("uniform"), GreedyEmptier())
    trace.max_backlog

The CLI equivalent is ``cupgames run --config experiment.json``.
"""

from .engine import (
    BudgetExceeded,
    CapabilityMismatch,
    CupState,
    DuplicateCup,
    EmptyDecision,
    FillMove,
    GameConfig,
    GameError,
    GameSetup,
    IllegalEmpty,
    NonPositivePlacement,
    PerCupCapExceeded,
    RuleViolation,
    Trace,
    apply_step,
    as_fraction,
    fractional_reset,
    new_game,
    run_game,
    validate_fill_move,
)
from .emptiers import (
    AffineScore,
    AsymmetricEmptier,
    DynamicScoreEmptier,
    EquilibriumNotFound,
    FillNotHalfIntegral,
    GreedyEmptier,
    LexScore,
    ScoreEmptier,
    SmoothedGreedyEmptier,
    ThresholdQueue,
    emptier_from_descriptor,
    equilibrium,
    priority_level,
    queue_view,
)
from .fillers import (
    BaselineFiller,
    ClairvoyantPkcFiller,
    FuzzingFiller,
    PkcFiller,
    TailAmplifierFiller,
    UnpredictabilityAttackFiller,
    filler_from_descriptor,
    harmonic_fill,
    iterate_moves,
    pkc_step_count,
)
from .metrics import (
    IntervalFillLog,
    MetricSeries,
    backlog,
    bolus_and_variation,
    crossing_count,
    crossing_counts,
    default_census_levels,
    fully_queued,
    influence,
    interval_fill_log,
    queued_by_level,
    rest_steps,
    shifted_lp_norm,
    tail_size,
    wasted_steps,
)

__version__ = "0.1.0"

__all__ = [
    "AffineScore", "AsymmetricEmptier", "BaselineFiller", "BudgetExceeded",
    "CapabilityMismatch", "ClairvoyantPkcFiller", "CupState",
    "DuplicateCup", "DynamicScoreEmptier", "EmptyDecision",
    "EquilibriumNotFound", "FillMove", "FillNotHalfIntegral",
    "FuzzingFiller", "GameConfig", "GameError", "GameSetup",
    "GreedyEmptier", "IllegalEmpty", "IntervalFillLog", "LexScore",
    "MetricSeries", "NonPositivePlacement", "PerCupCapExceeded",
    "PkcFiller", "RuleViolation", "ScoreEmptier", "SmoothedGreedyEmptier",
    "TailAmplifierFiller", "ThresholdQueue", "Trace",
    "UnpredictabilityAttackFiller", "apply_step", "as_fraction", "backlog",
    "bolus_and_variation", "crossing_count", "crossing_counts",
    "default_census_levels", "emptier_from_descriptor", "equilibrium",
    "filler_from_descriptor", "fractional_reset", "fully_queued",
    "harmonic_fill", "influence", "interval_fill_log", "iterate_moves",
    "new_game", "pkc_step_count", "priority_level", "queue_view",
    "queued_by_level", "rest_steps", "run_game", "shifted_lp_norm",
    "tail_size", "validate_fill_move", "wasted_steps",
]
