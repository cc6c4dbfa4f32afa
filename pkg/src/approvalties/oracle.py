"""Brute-force reference implementations, used as ground truth in tests.

Score-based rules are evaluated by exhaustively scoring every size-k
committee with from-scratch set arithmetic; none of the incremental
counters, bitmasks or pruning of the optimized modules is shared here.
Sequential rules are expanded through the full universe tree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import sequential
from .model import Committee, Election, WeightFunction

ORACLE_COMMITTEE_LIMIT = 10**6

_SCORE_TAGS = ("av", "sav", "thiele")
_SEQUENTIAL_TAGS = ("greedy-thiele", "phragmen", "meqs-phase1", "meqs-full")


@dataclass(frozen=True)
class RuleSpec:
    """A rule under test: tag, committee size, and weights where required."""

    tag: str
    k: int
    weights: WeightFunction | None = None

    def __post_init__(self):
        if self.tag not in _SCORE_TAGS + _SEQUENTIAL_TAGS:
            raise ValueError(f"unknown rule tag {self.tag!r}")
        needs_weights = self.tag in ("thiele", "greedy-thiele")
        if needs_weights != (self.weights is not None):
            raise ValueError(f"rule {self.tag!r} takes weights iff it is a Thiele rule")


def _candidate_score(election: Election, tag: str, candidate: int) -> Fraction:
    total = Fraction(0)
    for vote in election.votes:
        if candidate in vote:
            total += Fraction(1) if tag == "av" else Fraction(1, len(vote))
    return total


def _committee_w_score(election: Election, weights: WeightFunction, members: tuple[int, ...]) -> Fraction:
    committee = set(members)
    total = Fraction(0)
    for vote in election.votes:
        total += weights.value(len(vote & committee))
    return total


def oracle_winning_committees(spec: RuleSpec, election: Election) -> set[Committee]:
    """All winning committees by brute force."""
    m, k = election.num_candidates, spec.k
    if spec.tag in _SCORE_TAGS:
        if math.comb(m, k) > ORACLE_COMMITTEE_LIMIT:
            raise ValueError("instance too large for the brute-force oracle")
        best = None
        winners: set[Committee] = set()
        for members in itertools.combinations(range(m), k):
            if spec.tag == "thiele":
                score = _committee_w_score(election, spec.weights, members)
            else:
                score = sum(_candidate_score(election, spec.tag, c) for c in members)
            if best is None or score > best:
                best = score
                winners = {members}
            elif score == best:
                winners.add(members)
        return winners

    if spec.tag == "greedy-thiele":
        rule = sequential.greedy_thiele(spec.weights)
    elif spec.tag == "phragmen":
        rule = sequential.PHRAGMEN
    elif spec.tag == "meqs-phase1":
        rule = sequential.MEQS_PHASE1
    else:
        rule = sequential.MEQS_FULL
    universe = sequential.enumerate_universes(
        rule, election, k, max_branch_events=10**8, max_committees=10**7
    )
    if universe.truncated:
        raise ValueError("instance too large for full universe expansion")
    return set(universe.committees)


def oracle_count(spec: RuleSpec, election: Election) -> int:
    return len(oracle_winning_committees(spec, election))


def oracle_unique(spec: RuleSpec, election: Election) -> bool:
    return oracle_count(spec, election) == 1
