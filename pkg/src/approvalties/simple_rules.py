"""Polynomial-time winner determination and tie counting for AV and SAV.

Sort candidates by score, let x be the k-th best score, S the number of
candidates strictly above x and T the number at exactly x; then the
winning committees are the (T choose k-S) ways of filling the remaining
seats from the tied block.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import LimitExceededError
from .model import Committee, UniqueReport
from .scores import committee_sum


@dataclass(frozen=True)
class ScoreRuleTally:
    """Tie structure of a score-based rule at committee size k.

    ``cutoff`` is the k-th best score; ``above`` (S) and ``at`` (T) count
    candidates strictly above / exactly at the cutoff; ``count`` is the
    exact number of winning committees, C(T, k-S).
    """

    k: int
    cutoff: object
    above: int
    at: int
    count: int
    above_candidates: tuple[int, ...]
    tied_candidates: tuple[int, ...]


def score_rule_tally(scores: Sequence, k: int) -> ScoreRuleTally:
    """Compute the cutoff/above/at decomposition and the exact committee count."""
    m = len(scores)
    if not 1 <= k <= m:
        raise ValueError(f"committee size {k} out of range 1..{m}")
    # Equal scores ordered by ascending index for deterministic witnesses.
    order = sorted(range(m), key=lambda c: (_neg(scores[c]), c))
    cutoff = scores[order[k - 1]]
    above = tuple(c for c in range(m) if scores[c] > cutoff)
    tied = tuple(c for c in range(m) if scores[c] == cutoff)
    count = math.comb(len(tied), k - len(above))
    return ScoreRuleTally(
        k=k,
        cutoff=cutoff,
        above=len(above),
        at=len(tied),
        count=count,
        above_candidates=above,
        tied_candidates=tied,
    )


def _neg(x):
    return -x


def score_rule_unique(scores: Sequence, k: int) -> UniqueReport:
    """Uniqueness verdict with witness committees for a score-based rule."""
    tally = score_rule_tally(scores, k)
    seats = k - tally.above
    first = tally.above_candidates + tally.tied_candidates[:seats]
    optimum = committee_sum(scores, first)
    if tally.count == 1:
        return UniqueReport("unique", (tuple(sorted(first)),), optimum=optimum)
    second = tally.above_candidates + tally.tied_candidates[1 : seats + 1]
    return UniqueReport(
        "tied", (tuple(sorted(first)), tuple(sorted(second))), optimum=optimum
    )


def enumerate_score_rule_committees(
    scores: Sequence, k: int, limit: int = 10**5
) -> list[Committee]:
    """All winning committees, lexicographically sorted.

    Raises ``LimitExceededError`` (with the exact count) when there are
    more than ``limit`` of them.
    """
    tally = score_rule_tally(scores, k)
    if tally.count > limit:
        raise LimitExceededError(at_least=tally.count, limit=limit, exact=True)
    seats = k - tally.above
    committees = [
        tuple(sorted(tally.above_candidates + subset))
        for subset in itertools.combinations(tally.tied_candidates, seats)
    ]
    return sorted(committees)
