"""Tie-frequency experiment harness.

Sweeps voter counts, generates one election per (n, repetition) cell
from a child seed, decides uniqueness per rule, and aggregates a
frequency table.  Cells are independent work items; the aggregation is a
deterministic fold over the fixed cell ordering, so the output is
byte-identical for any worker count.
"""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass, field
from fractions import Fraction

from . import sequential, simple_rules, thiele
from .cultures import CultureSpec, generate
from .errors import ApprovaltiesError, LimitExceededError
from .model import Election, make_weight_function
from .scores import av_scores, sav_scores

RULE_TAGS = (
    "av",
    "sav",
    "ccav-exact",
    "pav-exact",
    "greedy-pav",
    "greedy-ccav",
    "phragmen",
    "meqs-phase1",
    "meqs-full",
)

#: Branch cap per sequential uniqueness query; a cell that hits it is
#: recorded as tied and flagged in the diagnostics CSV.
CELL_BRANCH_LIMIT = 10**6


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    k: int
    culture: CultureSpec
    rules: tuple[str, ...]
    n_start: int
    n_stop: int
    n_step: int
    repetitions: int
    master_seed: int
    workers: int = 1

    def __post_init__(self):
        for rule in self.rules:
            if rule not in RULE_TAGS:
                raise ValueError(f"unknown rule {rule!r}")
        if self.n_step < 1 or self.n_stop < self.n_start:
            raise ValueError("empty n grid")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")

    @property
    def n_grid(self) -> range:
        return range(self.n_start, self.n_stop + 1, self.n_step)

    def to_json(self) -> str:
        data = {
            "m": self.m,
            "k": self.k,
            "culture": self.culture.to_dict(),
            "rules": list(self.rules),
            "n_grid": {"start": self.n_start, "stop": self.n_stop, "step": self.n_step},
            "repetitions": self.repetitions,
            "master_seed": self.master_seed,
            "workers": self.workers,
        }
        return json.dumps(data, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        data = json.loads(text)
        grid = data["n_grid"]
        return cls(
            m=data["m"],
            k=data["k"],
            culture=CultureSpec.from_dict(data["culture"]),
            rules=tuple(data["rules"]),
            n_start=grid["start"],
            n_stop=grid["stop"],
            n_step=grid["step"],
            repetitions=data["repetitions"],
            master_seed=data["master_seed"],
            workers=data.get("workers", 1),
        )


@dataclass(frozen=True)
class FrequencyRow:
    rule: str
    n: int
    repetitions: int
    unique: int
    truncated: int = 0

    @property
    def tie_frequency(self) -> Fraction:
        return 1 - Fraction(self.unique, self.repetitions)


@dataclass(frozen=True)
class FrequencyTable:
    rows: tuple[FrequencyRow, ...] = field(default_factory=tuple)

    def row(self, rule: str, n: int) -> FrequencyRow:
        for row in self.rows:
            if row.rule == rule and row.n == n:
                return row
        raise KeyError((rule, n))

    def mean_tie_frequency(self, rule: str) -> Fraction:
        values = [row.tie_frequency for row in self.rows if row.rule == rule]
        if not values:
            raise KeyError(rule)
        return sum(values, Fraction(0)) / len(values)


_MASK64 = (1 << 64) - 1
_PHI64 = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    # splitmix64 finalizer
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def child_seed(master_seed: int, n: int, repetition: int) -> int:
    """Fixed 64-bit mixing of (master seed, n, repetition)."""
    x = _mix64(master_seed + _PHI64 * (n + 1))
    return _mix64(x + _PHI64 * (repetition + 1))


def evaluate_uniqueness(election: Election, rule: str, k: int) -> tuple[bool, bool]:
    """(unique, truncated) verdict of one rule on one election."""
    if rule == "av":
        return simple_rules.score_rule_unique(av_scores(election), k).is_unique, False
    if rule == "sav":
        return simple_rules.score_rule_unique(sav_scores(election), k).is_unique, False
    if rule == "ccav-exact":
        weights = make_weight_function("cc", k)
        return thiele.thiele_unique(election, weights, k).is_unique, False
    if rule == "pav-exact":
        weights = make_weight_function("pav", k)
        return thiele.thiele_unique(election, weights, k).is_unique, False
    if rule == "greedy-pav":
        seq_rule = sequential.greedy_thiele(make_weight_function("pav", k))
    elif rule == "greedy-ccav":
        seq_rule = sequential.greedy_thiele(make_weight_function("cc", k))
    elif rule == "phragmen":
        seq_rule = sequential.PHRAGMEN
    elif rule == "meqs-phase1":
        seq_rule = sequential.MEQS_PHASE1
    elif rule == "meqs-full":
        seq_rule = sequential.MEQS_FULL
    else:
        raise ValueError(f"unknown rule {rule!r}")
    try:
        report = sequential.sequential_unique(seq_rule, election, k, max_runs=CELL_BRANCH_LIMIT)
    except LimitExceededError:
        return False, True
    return report.is_unique, False


def _evaluate_cell(cfg: ExperimentConfig, n: int, repetition: int) -> list[tuple[str, bool, bool]]:
    seed = child_seed(cfg.master_seed, n, repetition)
    try:
        election = generate(cfg.culture.instantiate(cfg.m, n, seed))
        return [(rule,) + evaluate_uniqueness(election, rule, cfg.k) for rule in cfg.rules]
    except (ApprovaltiesError, ValueError) as exc:
        raise RuntimeError(f"cell (n={n}, repetition={repetition}) failed: {exc}") from exc


def _cell_worker(args: tuple[ExperimentConfig, int, int]):
    cfg, n, repetition = args
    return n, repetition, _evaluate_cell(cfg, n, repetition)


def run_basic_experiment(cfg: ExperimentConfig) -> FrequencyTable:
    """Run every (n, repetition) cell and aggregate tie frequencies per rule."""
    cells = [(cfg, n, rep) for n in cfg.n_grid for rep in range(cfg.repetitions)]
    results: dict[tuple[int, int], list[tuple[str, bool, bool]]] = {}
    if cfg.workers <= 1:
        for args in cells:
            n, rep, verdicts = _cell_worker(args)
            results[(n, rep)] = verdicts
    else:
        context = multiprocessing.get_context("spawn")
        with context.Pool(processes=cfg.workers) as pool:
            for n, rep, verdicts in pool.imap_unordered(_cell_worker, cells, chunksize=4):
                results[(n, rep)] = verdicts
    rows = []
    for n in cfg.n_grid:
        unique_counts = {rule: 0 for rule in cfg.rules}
        truncated_counts = {rule: 0 for rule in cfg.rules}
        for rep in range(cfg.repetitions):
            for rule, unique, truncated in results[(n, rep)]:
                unique_counts[rule] += unique
                truncated_counts[rule] += truncated
        rows.extend(
            FrequencyRow(rule, n, cfg.repetitions, unique_counts[rule], truncated_counts[rule])
            for rule in cfg.rules
        )
    return FrequencyTable(tuple(rows))


def _format_frequency(value: Fraction, digits: int = 6) -> str:
    # Exact decimal of a value in [0, 1], half-up in the last digit.
    scale = 10**digits
    units = (value.numerator * scale * 2 + value.denominator) // (2 * value.denominator)
    whole, frac = divmod(units, scale)
    return f"{whole}.{frac:0{digits}d}"


def emit_csv(table: FrequencyTable, diagnostics: bool = False) -> str:
    """Render the table: header plus one row per (rule, n), n then rule ascending."""
    header = "rule,n,reps,unique,tie_frequency"
    if diagnostics:
        header += ",truncated"
    lines = [header]
    for row in sorted(table.rows, key=lambda r: (r.n, r.rule)):
        line = (
            f"{row.rule},{row.n},{row.repetitions},{row.unique},"
            f"{_format_frequency(row.tie_frequency)}"
        )
        if diagnostics:
            line += f",{row.truncated}"
        lines.append(line)
    return "\n".join(lines) + "\n"
