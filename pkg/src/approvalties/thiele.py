"""Exact optimization-based Thiele rules (CCAV, PAV, custom 1-concave w).

Optimal score, enumeration of all optimal committees, uniqueness via a
find-a-second-distinct-committee search, and exact counting.

Scores are compared as scaled integers (the weight increments times the
lcm of their denominators), which is an exact rational comparison.  When
C(m, k) is small enough the search is plain exhaustive enumeration,
vectorized with integer-exact numpy arithmetic; larger instances use a
depth-first branch-and-bound whose upper bound (current score plus the
k-|S| largest remaining marginal gains) is admissible by submodularity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import LimitExceededError
from .model import Committee, Election, UniqueReport, WeightFunction
from .scores import SaturationCounter

#: Instances with at most this many size-k committees are enumerated exhaustively.
EXHAUSTIVE_LIMIT = 10**7

DEFAULT_COUNT_LIMIT = 10**6

_METHODS = ("auto", "exhaustive", "branch-and-bound")


@dataclass
class _SearchResult:
    scaled_best: int
    scale: int
    count: int          # number of optimal committees found (exact unless stopped early)
    exact_count: bool
    committees: list[Committee]  # first few optima in lexicographic order
    nodes: int

    @property
    def best(self) -> Fraction:
        return Fraction(self.scaled_best, self.scale)


def _check_args(election: Election, weights: WeightFunction, k: int, method: str) -> None:
    if not 1 <= k <= election.num_candidates:
        raise ValueError(f"committee size {k} out of range 1..{election.num_candidates}")
    if weights.max_committee_size() < k:
        raise ValueError("weight function has fewer increments than the committee size")
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}")


def _use_exhaustive(election: Election, k: int, method: str) -> bool:
    if method == "exhaustive":
        return True
    if method == "branch-and-bound":
        return False
    return math.comb(election.num_candidates, k) <= EXHAUSTIVE_LIMIT


# --- exhaustive enumeration ----------------------------------------------


def _numpy_safe(table: tuple[int, ...], num_voters: int, num_candidates: int) -> bool:
    # Intersection counts accumulate in float32 and must stay below 2^24;
    # per-committee scores accumulate in int64.
    return (
        num_candidates < 2**24
        and max(abs(w) for w in table) * max(num_voters, 1) < 2**62
    )


def _exhaustive_numpy(
    election: Election, weights: WeightFunction, k: int, collect_max: int | None
) -> _SearchResult:
    table, scale = weights.integer_table
    m, n = election.num_candidates, election.num_voters
    approvals = np.zeros((n, m), dtype=np.float32)
    for v, vote in enumerate(election.votes):
        for c in vote:
            approvals[v, c] = 1.0
    table_arr = np.asarray(table[: k + 1], dtype=np.int64)

    total = math.comb(m, k)
    chunk_size = max(1024, min(4_194_304 // n, 8_388_608 // m))
    combos = itertools.combinations(range(m), k)

    best = None
    count = 0
    collected: list[Committee] = []
    done = 0
    while done < total:
        size = min(chunk_size, total - done)
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(combos, size)),
            dtype=np.int64,
            count=size * k,
        )
        members = flat.reshape(size, k)
        onehot = np.zeros((size, m), dtype=np.float32)
        onehot[np.arange(size)[:, None], members] = 1.0
        # 0/1 float32 products summed over m < 2^24 terms are integer-exact.
        counts = (approvals @ onehot.T).astype(np.int64)
        chunk_scores = table_arr[counts].sum(axis=0, dtype=np.int64)
        chunk_best = int(chunk_scores.max())
        if best is None or chunk_best > best:
            best = chunk_best
            count = 0
            collected = []
        if chunk_best == best:
            hits = np.flatnonzero(chunk_scores == best)
            count += len(hits)
            if collect_max is None or len(collected) < collect_max:
                take = hits if collect_max is None else hits[: collect_max - len(collected)]
                collected.extend(tuple(int(c) for c in members[i]) for i in take)
        done += size
    return _SearchResult(best, scale, count, True, collected, nodes=total)


def _exhaustive_python(
    election: Election, weights: WeightFunction, k: int, collect_max: int | None
) -> _SearchResult:
    counter = SaturationCounter(election, weights)
    m = election.num_candidates
    best = None
    count = 0
    collected: list[Committee] = []
    nodes = 0
    chosen: list[int] = []

    def descend(start: int) -> None:
        nonlocal best, count, collected, nodes
        if len(chosen) == k:
            nodes += 1
            score = counter.scaled_score
            if best is None or score > best:
                best = score
                count = 1
                collected = [tuple(chosen)]
            elif score == best:
                count += 1
                if collect_max is None or len(collected) < collect_max:
                    collected.append(tuple(chosen))
            return
        need = k - len(chosen)
        for c in range(start, m - need + 1):
            counter.add(c)
            chosen.append(c)
            descend(c + 1)
            chosen.pop()
            counter.remove(c)

    descend(0)
    return _SearchResult(best, counter.scale, count, True, collected, nodes)


def _exhaustive(
    election: Election, weights: WeightFunction, k: int, collect_max: int | None
) -> _SearchResult:
    table, _ = weights.integer_table
    if _numpy_safe(table, election.num_voters, election.num_candidates):
        return _exhaustive_numpy(election, weights, k, collect_max)
    return _exhaustive_python(election, weights, k, collect_max)


# --- branch and bound -----------------------------------------------------


def _greedy_scaled_score(counter: SaturationCounter, m: int, k: int) -> int:
    chosen: list[int] = []
    for _ in range(k):
        best_c, best_gain = None, None
        for c in range(m):
            if c in chosen:
                continue
            gain = counter.scaled_gain(c)
            if best_gain is None or gain > best_gain:
                best_c, best_gain = c, gain
        counter.add(best_c)
        chosen.append(best_c)
    score = counter.scaled_score
    for c in chosen:
        counter.remove(c)
    return score


def _bnb_optimum_value(election: Election, weights: WeightFunction, k: int) -> tuple[int, int]:
    """Scaled optimal score via branch-and-bound; returns (value, nodes)."""
    m = election.num_candidates
    counter = SaturationCounter(election, weights)
    initial_gains = [counter.scaled_gain(c) for c in range(m)]
    order = sorted(range(m), key=lambda c: (-initial_gains[c], c))
    best = _greedy_scaled_score(counter, m, k)
    nodes = 0

    def descend(pos: int, size: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if size == k:
            if counter.scaled_score > best:
                best = counter.scaled_score
            return
        need = k - size
        gains = sorted((counter.scaled_gain(order[i]) for i in range(pos, m)), reverse=True)
        # A branch whose bound only matches `best` cannot strictly improve it.
        if counter.scaled_score + sum(gains[:need]) <= best:
            return
        for i in range(pos, m - need + 1):
            counter.add(order[i])
            descend(i + 1, size + 1)
            counter.remove(order[i])

    descend(0, 0)
    return best, nodes


def _bnb_collect(
    election: Election,
    weights: WeightFunction,
    k: int,
    optimum_scaled: int,
    collect_max: int | None,
    stop_after: int | None,
) -> _SearchResult:
    """Enumerate committees attaining the known optimum, in lexicographic order."""
    m = election.num_candidates
    counter = SaturationCounter(election, weights)
    count = 0
    collected: list[Committee] = []
    nodes = 0
    chosen: list[int] = []
    stopped = False

    def descend(start: int) -> None:
        nonlocal count, nodes, stopped
        if stopped:
            return
        nodes += 1
        if len(chosen) == k:
            if counter.scaled_score == optimum_scaled:
                count += 1
                if collect_max is None or len(collected) < collect_max:
                    collected.append(tuple(chosen))
                if stop_after is not None and count >= stop_after:
                    stopped = True
            return
        need = k - len(chosen)
        gains = sorted((counter.scaled_gain(c) for c in range(start, m)), reverse=True)
        if counter.scaled_score + sum(gains[:need]) < optimum_scaled:
            return
        for c in range(start, m - need + 1):
            counter.add(c)
            chosen.append(c)
            descend(c + 1)
            chosen.pop()
            counter.remove(c)
            if stopped:
                return

    descend(0)
    return _SearchResult(
        optimum_scaled, counter.scale, count, not stopped, collected, nodes
    )


def _search(
    election: Election,
    weights: WeightFunction,
    k: int,
    method: str,
    collect_max: int | None,
    stop_after: int | None = None,
) -> _SearchResult:
    _check_args(election, weights, k, method)
    if _use_exhaustive(election, k, method):
        return _exhaustive(election, weights, k, collect_max)
    optimum, nodes = _bnb_optimum_value(election, weights, k)
    result = _bnb_collect(election, weights, k, optimum, collect_max, stop_after)
    result.nodes += nodes
    return result


# --- public operations -----------------------------------------------------


def thiele_optimum(
    election: Election, weights: WeightFunction, k: int, method: str = "auto"
) -> tuple[Fraction, Committee]:
    """Maximum committee score and the lexicographically smallest optimal committee."""
    result = _search(election, weights, k, method, collect_max=1, stop_after=1)
    return result.best, result.committees[0]


def thiele_unique(
    election: Election, weights: WeightFunction, k: int, method: str = "auto"
) -> UniqueReport:
    """Decide whether exactly one size-k committee attains the optimum.

    The second-committee search stops as soon as a second optimum shows up.
    """
    result = _search(election, weights, k, method, collect_max=2, stop_after=2)
    if result.count == 1:
        return UniqueReport(
            "unique", (result.committees[0],), optimum=result.best, nodes_explored=result.nodes
        )
    return UniqueReport(
        "tied", tuple(result.committees[:2]), optimum=result.best, nodes_explored=result.nodes
    )


def thiele_count(
    election: Election,
    weights: WeightFunction,
    k: int,
    limit: int = DEFAULT_COUNT_LIMIT,
    method: str = "auto",
) -> int:
    """Exact number of optimal size-k committees.

    Raises ``LimitExceededError`` once more than ``limit`` optima exist.
    """
    result = _search(election, weights, k, method, collect_max=0, stop_after=limit + 1)
    if result.count > limit:
        raise LimitExceededError(at_least=result.count, limit=limit, exact=result.exact_count)
    return result.count


def enumerate_thiele_winning(
    election: Election,
    weights: WeightFunction,
    k: int,
    limit: int = DEFAULT_COUNT_LIMIT,
    method: str = "auto",
) -> list[Committee]:
    """All optimal committees in lexicographic order; errors out above ``limit``."""
    result = _search(election, weights, k, method, collect_max=limit + 1, stop_after=limit + 1)
    if result.count > limit:
        raise LimitExceededError(at_least=result.count, limit=limit, exact=result.exact_count)
    return sorted(result.committees)
