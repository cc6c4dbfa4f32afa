"""Core immutable data model: elections, committees, weight functions.

All score-like quantities in this package are exact rationals
(:class:`fractions.Fraction`); nothing is ever rounded.  Approval sets are
additionally mirrored as candidate bitmasks so that committee/vote
intersection sizes are a single ``&`` plus popcount.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import ElectionFormatError, WeightFunctionError

#: Exact rational number used for every score, budget, time and cost.
Rational = Fraction

#: A committee is a strictly increasing tuple of candidate indices.
Committee = tuple[int, ...]


def parse_rational(text: str) -> Fraction:
    """Parse ``a/b`` or a decimal literal into an exact Fraction.

    Decimal literals are read exactly as fractions over powers of ten,
    so ``"0.75"`` becomes 3/4, never a float.
    """
    return Fraction(text.strip())


def make_committee(members: Iterable[int], num_candidates: int | None = None) -> Committee:
    """Sort and validate a candidate collection into a committee tuple."""
    committee = tuple(sorted(members))
    for i, c in enumerate(committee):
        if i > 0 and committee[i - 1] == c:
            raise ValueError(f"duplicate candidate {c} in committee")
        if c < 0 or (num_candidates is not None and c >= num_candidates):
            raise ValueError(f"candidate index {c} out of range")
    return committee


@dataclass(frozen=True)
class Election:
    """An approval election: ``num_candidates`` candidates, one approval set per voter.

    Candidates are the indices ``0 .. num_candidates-1``.  Empty approval
    sets are legal.  Instances are immutable and safe to share between
    workers.
    """

    num_candidates: int
    votes: tuple[frozenset[int], ...]

    def __init__(self, num_candidates: int, votes: Iterable[Iterable[int]]):
        object.__setattr__(self, "num_candidates", num_candidates)
        object.__setattr__(self, "votes", tuple(frozenset(v) for v in votes))
        if self.num_candidates < 1:
            raise ValueError("need at least one candidate")
        if not self.votes:
            raise ValueError("need at least one voter")
        for vote in self.votes:
            for c in vote:
                if not 0 <= c < self.num_candidates:
                    raise ValueError(f"candidate index {c} out of range")

    @property
    def num_voters(self) -> int:
        return len(self.votes)

    @property
    def candidates(self) -> range:
        return range(self.num_candidates)

    @cached_property
    def vote_masks(self) -> tuple[int, ...]:
        """Each vote as a bitmask (bit ``c`` set iff candidate ``c`` approved)."""
        return tuple(sum(1 << c for c in vote) for vote in self.votes)

    @cached_property
    def approver_lists(self) -> tuple[tuple[int, ...], ...]:
        """For each candidate, the tuple of voters approving it."""
        lists: list[list[int]] = [[] for _ in range(self.num_candidates)]
        for v, vote in enumerate(self.votes):
            for c in vote:
                lists[c].append(v)
        return tuple(tuple(l) for l in lists)

    def approvers(self, candidate: int) -> tuple[int, ...]:
        return self.approver_lists[candidate]


@dataclass(frozen=True)
class WeightFunction:
    """A 1-concave Thiele weight function given by marginal increments.

    ``increments[i-1]`` is delta_i = w(i) - w(i-1); w(0) = 0 is implicit.
    Valid lists satisfy delta_1 = 1 and delta_1 >= delta_2 >= ... >= 0.
    """

    name: str
    increments: tuple[Fraction, ...] = field(repr=False)

    @cached_property
    def partial_sums(self) -> tuple[Fraction, ...]:
        """``partial_sums[j]`` = w(j) for j = 0 .. len(increments)."""
        sums = [Fraction(0)]
        for d in self.increments:
            sums.append(sums[-1] + d)
        return tuple(sums)

    @cached_property
    def integer_table(self) -> tuple[tuple[int, ...], int]:
        """``(table, scale)`` with ``table[j] = w(j) * scale`` an exact integer.

        ``scale`` is the lcm of the increment denominators, so comparing
        table entries is an exact rational comparison.
        """
        scale = 1
        for d in self.increments:
            scale = scale * d.denominator // math.gcd(scale, d.denominator)
        table = tuple(int(w * scale) for w in self.partial_sums)
        return table, scale

    def value(self, j: int) -> Fraction:
        """w(j)."""
        return self.partial_sums[j]

    def increment(self, i: int) -> Fraction:
        """delta_i = w(i) - w(i-1), 1-based."""
        return self.increments[i - 1]

    def max_committee_size(self) -> int:
        return len(self.increments)


def make_weight_function(kind: str, k: int) -> WeightFunction:
    """Build the increment list of a named Thiele rule, long enough for size-k committees.

    ``av``: w(t) = t; ``cc``: w(t) = [t >= 1]; ``pav``: w(t) = sum_{i<=t} 1/i.
    """
    if k < 1:
        raise ValueError("committee size must be at least 1")
    tag = kind.lower()
    if tag == "av":
        increments = tuple(Fraction(1) for _ in range(k))
    elif tag in ("cc", "ccav"):
        increments = (Fraction(1),) + tuple(Fraction(0) for _ in range(k - 1))
    elif tag == "pav":
        increments = tuple(Fraction(1, i) for i in range(1, k + 1))
    else:
        raise ValueError(f"unknown weight function tag {kind!r}")
    return WeightFunction(tag if tag != "ccav" else "cc", increments)


def validate_weight_function(
    increments: Sequence[Fraction | int], name: str = "custom"
) -> WeightFunction:
    """Validate an increment list and wrap it as a WeightFunction.

    Rejects with the first violated constraint and its (1-based) index.
    """
    fracs = tuple(Fraction(d) for d in increments)
    if not fracs:
        raise WeightFunctionError("increment list is empty", index=1)
    if fracs[0] != 1:
        raise WeightFunctionError(f"delta_1 must equal 1, got {fracs[0]}", index=1)
    for i, d in enumerate(fracs, start=1):
        if d < 0:
            raise WeightFunctionError(f"delta_{i} = {d} is negative", index=i)
        if i >= 2 and fracs[i - 2] < d:
            raise WeightFunctionError(
                f"concavity violated at i={i}: delta_{i-1} = {fracs[i-2]} < delta_{i} = {d}",
                index=i,
            )
    return WeightFunction(name, fracs)


# --- election file format ------------------------------------------------
#
# UTF-8 text, one datum per line:
#   m <int>                 candidate count
#   n <int>                 voter count
#   v [<idx> ...]           one line per voter, 0-based candidate indices
# Lines starting with '#' are comments.

_HEADER_RE = re.compile(r"^([mn])\s+(-?\d+)\s*$")


def parse_election(text: str) -> Election:
    """Parse the election file format; report errors with line numbers."""
    num_candidates = None
    num_voters = None
    votes: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if num_candidates is None or num_voters is None:
            match = _HEADER_RE.match(line)
            expected = "m" if num_candidates is None else "n"
            if not match or match.group(1) != expected:
                raise ElectionFormatError(
                    f"expected header '{expected} <int>', got {line!r}", line=lineno
                )
            value = int(match.group(2))
            if value < 1:
                raise ElectionFormatError(f"'{expected}' must be at least 1", line=lineno)
            if expected == "m":
                num_candidates = value
            else:
                num_voters = value
            continue
        tokens = line.split()
        if tokens[0] != "v":
            raise ElectionFormatError(f"expected a 'v' line, got {line!r}", line=lineno)
        if len(votes) >= num_voters:
            raise ElectionFormatError("more 'v' lines than declared voters", line=lineno)
        vote: list[int] = []
        seen: set[int] = set()
        for token in tokens[1:]:
            try:
                c = int(token)
            except ValueError:
                raise ElectionFormatError(f"bad candidate index {token!r}", line=lineno) from None
            if not 0 <= c < num_candidates:
                raise ElectionFormatError(f"index {c} out of range", line=lineno)
            if c in seen:
                raise ElectionFormatError(f"duplicate index {c} within a vote", line=lineno)
            seen.add(c)
            vote.append(c)
        votes.append(vote)
    if num_candidates is None or num_voters is None:
        raise ElectionFormatError("missing 'm'/'n' header")
    if len(votes) != num_voters:
        raise ElectionFormatError(f"declared {num_voters} voters but found {len(votes)} 'v' lines")
    return Election(num_candidates, votes)


def serialize_election(election: Election) -> str:
    """Serialize to the election file format; indices emitted in increasing order."""
    lines = [f"m {election.num_candidates}", f"n {election.num_voters}"]
    for vote in election.votes:
        if vote:
            lines.append("v " + " ".join(str(c) for c in sorted(vote)))
        else:
            lines.append("v")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class UniqueReport:
    """Outcome of a unique-committee query.

    ``witnesses`` holds one committee when the verdict is ``"unique"`` and
    at least two distinct committees when it is ``"tied"``.  ``optimum``
    is the optimal score for score-maximizing rules, ``None`` otherwise.
    """

    verdict: str
    witnesses: tuple[Committee, ...]
    optimum: Fraction | None = None
    nodes_explored: int = 0

    def __post_init__(self):
        if self.verdict not in ("unique", "tied"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "unique" and len(self.witnesses) != 1:
            raise ValueError("unique verdict requires exactly one witness")
        if self.verdict == "tied" and len(set(self.witnesses)) < 2:
            raise ValueError("tied verdict requires two distinct witnesses")

    @property
    def is_unique(self) -> bool:
        return self.verdict == "unique"
