"""Exact score computations shared by all rules.

Per-candidate AV/SAV scores, committee scores under a Thiele weight
function, and marginal gains.  Everything is exact; AV scores are plain
integers, all other quantities are Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .model import Election, WeightFunction


def av_scores(election: Election) -> tuple[int, ...]:
    """Approval score per candidate: the number of voters approving it."""
    scores = [0] * election.num_candidates
    for vote in election.votes:
        for c in vote:
            scores[c] += 1
    return tuple(scores)


def sav_scores(election: Election) -> tuple[Fraction, ...]:
    """Satisfaction-approval score per candidate.

    Each voter splits a single point equally among its approved
    candidates; a voter with an empty approval set contributes nothing.
    """
    scores = [Fraction(0)] * election.num_candidates
    for vote in election.votes:
        if not vote:
            continue
        share = Fraction(1, len(vote))
        for c in vote:
            scores[c] += share
    return tuple(scores)


def w_score(election: Election, weights: WeightFunction, committee: Iterable[int]) -> Fraction:
    """Committee score sum_v w(|A(v) & S|) under the given weight function."""
    mask = 0
    size = 0
    for c in committee:
        mask |= 1 << c
        size += 1
    if size > weights.max_committee_size():
        raise ValueError("committee larger than the weight function's increment list")
    sums = weights.partial_sums
    total = Fraction(0)
    for vote_mask in election.vote_masks:
        total += sums[(vote_mask & mask).bit_count()]
    return total


def marginal_gain(
    election: Election, weights: WeightFunction, committee: Iterable[int], candidate: int
) -> Fraction:
    """Exact increase of the committee score when ``candidate`` joins.

    Computed incrementally as sum over approvers v of delta_{|A(v) & S| + 1}.
    """
    mask = 0
    size = 0
    for c in committee:
        if c == candidate:
            raise ValueError(f"candidate {candidate} already in committee")
        mask |= 1 << c
        size += 1
    if size + 1 > weights.max_committee_size():
        raise ValueError("committee larger than the weight function's increment list")
    increments = weights.increments
    gain = Fraction(0)
    for v in election.approvers(candidate):
        gain += increments[(election.vote_masks[v] & mask).bit_count()]
    return gain


class SaturationCounter:
    """Per-voter counts |A(v) & S| maintained incrementally as S changes.

    Marginal gains are computed against the scaled integer weight table,
    so inner loops of the greedy rules and of branch-and-bound compare
    machine integers; dividing by ``scale`` recovers the exact Fraction.
    """

    __slots__ = ("election", "table", "scale", "counts", "scaled_score")

    def __init__(self, election: Election, weights: WeightFunction):
        self.election = election
        self.table, self.scale = weights.integer_table
        self.counts = [0] * election.num_voters
        self.scaled_score = 0

    def add(self, candidate: int) -> None:
        table = self.table
        counts = self.counts
        for v in self.election.approvers(candidate):
            j = counts[v]
            self.scaled_score += table[j + 1] - table[j]
            counts[v] = j + 1

    def remove(self, candidate: int) -> None:
        table = self.table
        counts = self.counts
        for v in self.election.approvers(candidate):
            j = counts[v]
            self.scaled_score += table[j - 1] - table[j]
            counts[v] = j - 1

    def scaled_gain(self, candidate: int) -> int:
        """Scaled marginal gain of adding ``candidate`` to the current set."""
        table = self.table
        counts = self.counts
        gain = 0
        for v in self.election.approvers(candidate):
            j = counts[v]
            gain += table[j + 1] - table[j]
        return gain

    def score(self) -> Fraction:
        return Fraction(self.scaled_score, self.scale)


def committee_sum(scores: Sequence, committee: Iterable[int]):
    """Sum of per-candidate scores over a committee (AV/SAV committee score)."""
    total = 0
    for c in committee:
        total = total + scores[c]
    return total
