"""Winning committees, tie detection, and tie counting for approval-based
multiwinner voting rules, with exact rational arithmetic throughout."""

from .errors import (
    ApprovaltiesError,
    ConservationError,
    ElectionFormatError,
    LimitExceededError,
    UnfillableCommitteeError,
    WeightFunctionError,
)
from .model import (
    Committee,
    Election,
    Rational,
    UniqueReport,
    WeightFunction,
    make_committee,
    make_weight_function,
    parse_election,
    parse_rational,
    serialize_election,
    validate_weight_function,
)
from .scores import av_scores, marginal_gain, sav_scores, w_score
from .simple_rules import (
    ScoreRuleTally,
    enumerate_score_rule_committees,
    score_rule_tally,
    score_rule_unique,
)
from .thiele import (
    enumerate_thiele_winning,
    thiele_count,
    thiele_optimum,
    thiele_unique,
)
from .sequential import (
    MEQS_FULL,
    MEQS_PHASE1,
    PHRAGMEN,
    SequentialRule,
    SequentialState,
    TieSet,
    UniverseSet,
    apply_choice,
    enumerate_universes,
    greedy_thiele,
    initial_state,
    per_voter_cost,
    run_resolute,
    sequential_unique,
    tie_set,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
