"""Sequential rules under parallel-universes tie-breaking.

Covers greedy Thiele rules (GreedyCCAV, GreedyPAV, custom 1-concave
weights), Phragmen's continuous-money rule, Phase 1 of the Method of
Equal Shares, and the full method (Phase 1 completed by Phragmen on the
leftover budgets, with a fresh clock).

All budgets, purchase times and per-voter costs are exact Fractions.
States are immutable values, cheap to fork at tie points.  Simultaneous
affordability of several candidates counts as a tie even when their
supporter sets are disjoint: purchase order can matter downstream, and
the tie-breaking model quantifies over all resolutions.

Empty votes are legal everywhere: such voters accrue or hold money but
never spend it, and they never affect a marginal gain.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable

from .errors import ConservationError, LimitExceededError, UnfillableCommitteeError
from .model import Committee, Election, UniqueReport, WeightFunction

DEFAULT_MAX_BRANCH_EVENTS = 10**6
DEFAULT_MAX_COMMITTEES = 10**5

_KINDS = ("greedy-thiele", "phragmen", "meqs-phase1", "meqs-full")

# Expansion modes: which selection/payment mechanism applies at a state.
_GREEDY, _PHRAGMEN, _PHASE1 = "greedy", "phragmen", "phase1"


@dataclass(frozen=True)
class SequentialRule:
    """A sequential rule identifier; greedy Thiele rules carry their weights."""

    kind: str
    weights: WeightFunction | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown sequential rule {self.kind!r}")
        if (self.kind == "greedy-thiele") != (self.weights is not None):
            raise ValueError("weights are required for greedy-thiele and only for it")

    @property
    def label(self) -> str:
        if self.weights is not None:
            return f"greedy-thiele({self.weights.name})"
        return self.kind


def greedy_thiele(weights: WeightFunction) -> SequentialRule:
    return SequentialRule("greedy-thiele", weights)


PHRAGMEN = SequentialRule("phragmen")
MEQS_PHASE1 = SequentialRule("meqs-phase1")
MEQS_FULL = SequentialRule("meqs-full")


@dataclass(frozen=True)
class SequentialState:
    """Resumable state of a sequential rule run.

    ``chosen`` is in selection order; ``budgets`` and ``clock`` are unused
    by greedy rules; ``phase`` distinguishes Phase 1 from the Phragmen
    completion for the full Method of Equal Shares.
    """

    rule: SequentialRule
    chosen: tuple[int, ...] = ()
    budgets: tuple[Fraction, ...] = ()
    clock: Fraction = Fraction(0)
    phase: str = ""


@dataclass(frozen=True)
class TieSet:
    """Equally best next selections: all members share one exact merit.

    The merit is the marginal gain for greedy rules, the purchase time
    for Phragmen, and the per-voter cost for MEqS Phase 1.
    """

    candidates: tuple[int, ...]
    merit: Fraction


@dataclass(frozen=True)
class UniverseSet:
    """All committees reachable under some resolution of the internal ties."""

    committees: frozenset[Committee]
    truncated: bool
    universes_explored: int


def initial_state(rule: SequentialRule, election: Election, k: int) -> SequentialState:
    n = election.num_voters
    if rule.kind == "greedy-thiele":
        return SequentialState(rule)
    if rule.kind == "phragmen":
        return SequentialState(rule, budgets=(Fraction(0),) * n)
    phase = "phase1" if rule.kind == "meqs-full" else ""
    return SequentialState(rule, budgets=(Fraction(k, n),) * n, phase=phase)


def per_voter_cost(budgets: Iterable[Fraction]) -> Fraction | None:
    """Smallest cap rho with sum(min(b, rho)) = 1, or None if unaffordable.

    Solves the piecewise-linear equation on the correct segment of the
    ascending budget sequence.
    """
    bs = sorted(budgets)
    if sum(bs) < 1:
        return None
    paid = Fraction(0)
    r = len(bs)
    for t in range(r):
        rho = Fraction(1 - paid, r - t)
        if rho <= bs[t]:
            return rho
        paid += bs[t]
    raise ConservationError("per-voter cost fell through despite sufficient budget")


def _greedy_options(state: SequentialState, election: Election) -> TieSet:
    weights = state.rule.weights
    table, scale = weights.integer_table
    masks = election.vote_masks
    chosen_mask = 0
    for c in state.chosen:
        chosen_mask |= 1 << c
    best_gain = None
    tied: list[int] = []
    for c in election.candidates:
        if chosen_mask >> c & 1:
            continue
        gain = 0
        for v in election.approvers(c):
            j = (masks[v] & chosen_mask).bit_count()
            gain += table[j + 1] - table[j]
        if best_gain is None or gain > best_gain:
            best_gain = gain
            tied = [c]
        elif gain == best_gain:
            tied.append(c)
    return TieSet(tuple(tied), Fraction(best_gain, scale))


def _phragmen_options(state: SequentialState, election: Election) -> TieSet | None:
    chosen = set(state.chosen)
    best_time = None
    tied: list[int] = []
    for c in election.candidates:
        if c in chosen:
            continue
        approvers = election.approvers(c)
        if not approvers:
            continue
        held = sum(state.budgets[v] for v in approvers)
        deficit = 1 - held
        time = state.clock + deficit / len(approvers) if deficit > 0 else state.clock
        if best_time is None or time < best_time:
            best_time = time
            tied = [c]
        elif time == best_time:
            tied.append(c)
    if best_time is None:
        return None
    return TieSet(tuple(tied), best_time)


def _phase1_options(state: SequentialState, election: Election) -> TieSet | None:
    chosen = set(state.chosen)
    best_cost = None
    tied: list[int] = []
    for c in election.candidates:
        if c in chosen:
            continue
        approvers = election.approvers(c)
        if not approvers:
            continue
        cost = per_voter_cost(state.budgets[v] for v in approvers)
        if cost is None:
            continue
        if best_cost is None or cost < best_cost:
            best_cost = cost
            tied = [c]
        elif cost == best_cost:
            tied.append(c)
    if best_cost is None:
        return None
    return TieSet(tuple(tied), best_cost)


def _expand(state: SequentialState, election: Election) -> tuple[str, TieSet | None]:
    kind = state.rule.kind
    if kind == "greedy-thiele":
        return _GREEDY, _greedy_options(state, election)
    if kind == "phragmen":
        return _PHRAGMEN, _phragmen_options(state, election)
    if kind == "meqs-phase1":
        return _PHASE1, _phase1_options(state, election)
    # meqs-full: Phase 1 until nothing is affordable, then Phragmen on the
    # leftover budgets with a fresh clock (state.clock stays 0 in phase 1).
    if state.phase == "phase1":
        options = _phase1_options(state, election)
        if options is not None:
            return _PHASE1, options
    return _PHRAGMEN, _phragmen_options(state, election)


def _apply(
    state: SequentialState, candidate: int, mode: str, merit: Fraction, election: Election
) -> SequentialState:
    chosen = state.chosen + (candidate,)
    if mode == _GREEDY:
        return replace(state, chosen=chosen)
    approvers = election.approvers(candidate)
    if mode == _PHRAGMEN:
        step = merit - state.clock
        budgets = [b + step for b in state.budgets]
        forfeited = sum(budgets[v] for v in approvers)
        if forfeited != 1:
            raise ConservationError(
                f"Phragmen purchase of {candidate} forfeits {forfeited}, not 1"
            )
        for v in approvers:
            budgets[v] = Fraction(0)
        phase = "completion" if state.rule.kind == "meqs-full" else state.phase
        return replace(
            state, chosen=chosen, budgets=tuple(budgets), clock=merit, phase=phase
        )
    if mode == _PHASE1:
        budgets = list(state.budgets)
        collected = Fraction(0)
        for v in approvers:
            payment = min(budgets[v], merit)
            budgets[v] -= payment
            collected += payment
        if collected != 1:
            raise ConservationError(
                f"MEqS purchase of {candidate} collects {collected}, not 1"
            )
        return replace(state, chosen=chosen, budgets=tuple(budgets))
    raise ValueError(f"unknown mode {mode!r}")


def tie_set(state: SequentialState, election: Election, k: int) -> TieSet | None:
    """Candidates of equal best merit at this state; None when the rule is exhausted."""
    if len(state.chosen) >= k:
        raise ValueError("tie_set called on a complete committee")
    _, options = _expand(state, election)
    return options


def apply_choice(
    state: SequentialState, candidate: int, election: Election, k: int
) -> SequentialState:
    """Successor state after selecting ``candidate`` from the current tie set."""
    if len(state.chosen) >= k:
        raise ValueError("apply_choice called on a complete committee")
    mode, options = _expand(state, election)
    if options is None or candidate not in options.candidates:
        raise ValueError(f"candidate {candidate} is not in the current tie set")
    return _apply(state, candidate, mode, options.merit, election)


def _approvable_count(election: Election) -> int:
    return sum(1 for c in election.candidates if election.approvers(c))


def _check_runnable(rule: SequentialRule, election: Election, k: int) -> None:
    if k < 0:
        raise ValueError("committee size must be nonnegative")
    if rule.kind == "greedy-thiele":
        if k > election.num_candidates:
            raise UnfillableCommitteeError(
                f"committee size {k} exceeds candidate count {election.num_candidates}"
            )
        if rule.weights.max_committee_size() < k:
            raise ValueError("weight function has fewer increments than the committee size")
    elif rule.kind in ("phragmen", "meqs-full"):
        approvable = _approvable_count(election)
        if approvable < k:
            raise UnfillableCommitteeError(
                f"only {approvable} candidates have approvers; cannot fill {k} seats"
            )


def run_resolute(
    rule: SequentialRule, election: Election, k: int
) -> tuple[Committee, list[TieSet]]:
    """One deterministic run, taking the smallest index at every tie.

    MEqS Phase 1 may legitimately return fewer than k members; the other
    rules always fill all seats or raise.
    """
    _check_runnable(rule, election, k)
    state = initial_state(rule, election, k)
    trace: list[TieSet] = []
    while len(state.chosen) < k:
        mode, options = _expand(state, election)
        if options is None:
            if rule.kind == "meqs-phase1":
                break
            raise UnfillableCommitteeError(f"{rule.label} ran out of selectable candidates")
        trace.append(options)
        state = _apply(state, options.candidates[0], mode, options.merit, election)
    return tuple(sorted(state.chosen)), trace


def _state_key(state: SequentialState):
    # Greedy states are determined by the chosen set; money rules also
    # need budgets, clock and phase.
    members = frozenset(state.chosen)
    if state.rule.kind == "greedy-thiele":
        return members
    return (members, state.budgets, state.clock, state.phase)


def enumerate_universes(
    rule: SequentialRule,
    election: Election,
    k: int,
    max_branch_events: int = DEFAULT_MAX_BRANCH_EVENTS,
    max_committees: int = DEFAULT_MAX_COMMITTEES,
) -> UniverseSet:
    """Every committee reachable by some resolution of every internal tie.

    Explores the full choice tree depth-first, merging states that are
    exactly equal (same chosen set, budgets, clock and phase), so
    permutations of an identical history are expanded once.  Final
    committees are deduplicated as sets.  ``truncated`` is set when either
    limit (choice applications / distinct committees) is hit.
    """
    _check_runnable(rule, election, k)
    start = initial_state(rule, election, k)
    stack = [start]
    seen = {_state_key(start)}
    committees: set[Committee] = set()
    events = 0
    completions = 0
    truncated = False
    while stack and not truncated:
        state = stack.pop()
        if len(state.chosen) == k:
            completions += 1
            committees.add(tuple(sorted(state.chosen)))
            if len(committees) > max_committees:
                truncated = True
            continue
        mode, options = _expand(state, election)
        if options is None:
            if rule.kind != "meqs-phase1":
                raise UnfillableCommitteeError(f"{rule.label} ran out of selectable candidates")
            completions += 1
            committees.add(tuple(sorted(state.chosen)))
            if len(committees) > max_committees:
                truncated = True
            continue
        for candidate in reversed(options.candidates):
            events += 1
            if events > max_branch_events:
                truncated = True
                break
            child = _apply(state, candidate, mode, options.merit, election)
            key = _state_key(child)
            if key not in seen:
                seen.add(key)
                stack.append(child)
    return UniverseSet(frozenset(committees), truncated, completions)


def _complete_resolute(state: SequentialState, election: Election, k: int) -> Committee:
    while len(state.chosen) < k:
        mode, options = _expand(state, election)
        if options is None:
            if state.rule.kind == "meqs-phase1":
                break
            raise UnfillableCommitteeError(f"{state.rule.label} ran out of selectable candidates")
        state = _apply(state, options.candidates[0], mode, options.merit, election)
    return tuple(sorted(state.chosen))


def sequential_unique(
    rule: SequentialRule, election: Election, k: int, max_runs: int | None = None
) -> UniqueReport:
    """FPT unique-committee decision for a sequential rule.

    Computes a reference committee W resolutely, then re-runs the rule
    branching only inside tie sets contained in W.  Any tie offering a
    candidate outside W is completed resolutely through that candidate
    and reported, together with W, as a tie.  The verdict is unique iff
    every branch terminates in W; the search needs at most O(k!) runs.

    ``max_runs`` optionally caps the number of explored branch states and
    raises ``LimitExceededError`` when exceeded.
    """
    reference, _ = run_resolute(rule, election, k)
    inside = set(reference)
    start = initial_state(rule, election, k)
    stack = [start]
    seen = {_state_key(start)}
    nodes = 0
    while stack:
        state = stack.pop()
        nodes += 1
        if max_runs is not None and nodes > max_runs:
            raise LimitExceededError(at_least=2, limit=max_runs)
        if len(state.chosen) == k:
            committee = tuple(sorted(state.chosen))
            if committee != reference:
                return UniqueReport("tied", (reference, committee), nodes_explored=nodes)
            continue
        mode, options = _expand(state, election)
        if options is None:
            if rule.kind != "meqs-phase1":
                raise UnfillableCommitteeError(f"{rule.label} ran out of selectable candidates")
            committee = tuple(sorted(state.chosen))
            if committee != reference:
                return UniqueReport("tied", (reference, committee), nodes_explored=nodes)
            continue
        outsiders = [c for c in options.candidates if c not in inside]
        if outsiders:
            child = _apply(state, outsiders[0], mode, options.merit, election)
            other = _complete_resolute(child, election, k)
            return UniqueReport("tied", (reference, other), nodes_explored=nodes)
        for candidate in reversed(options.candidates):
            child = _apply(state, candidate, mode, options.merit, election)
            key = _state_key(child)
            if key not in seen:
                seen.add(key)
                stack.append(child)
    return UniqueReport("unique", (reference,), nodes_explored=nodes)
