"""Seeded random election generators and participatory-budgeting ingestion.

Every generator is a pure function of its parameters and a 64-bit seed:
one ``random.Random`` stream per call, with a fixed draw order, so
identical inputs give bit-identical elections on every run and under any
worker count.

Resampling model: a central vote approving exactly floor(p*m) candidates
is drawn uniformly; each voter independently copies each candidate's
status from the central vote with probability 1-phi and otherwise
re-approves it with probability p.  Draw order: central vote, then
voters in order, candidates in index order (the re-approval draw happens
only on resampled entries).

Interval model: voter and candidate points uniform on [0, 1]; candidate
radii normal with mean r and standard deviation r/2 (Box-Muller from two
uniform draws, clamped below at zero); a voter approves a candidate iff
their points are within that candidate's radius.  Draw order: voter
points, candidate points, radii.

PB files: project costs are read for validation and then discarded; all
downstream use is approval-only.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import ElectionFormatError
from .model import Election

_U64 = 1 << 64
_U53 = float(1 << 53)

_CULTURES = ("resampling", "interval", "pabulib")


@dataclass(frozen=True)
class CultureSpec:
    """Shape parameters of a statistical culture, without size or seed."""

    culture: str
    p: Fraction | None = None
    phi: Fraction | None = None
    radius: float | None = None
    source: str | None = None

    def __post_init__(self):
        if self.culture not in _CULTURES:
            raise ValueError(f"unknown culture {self.culture!r}")
        if self.culture == "resampling":
            if self.p is None or self.phi is None:
                raise ValueError("resampling culture needs p and phi")
            if not (0 <= self.p <= 1 and 0 <= self.phi <= 1):
                raise ValueError("p and phi must lie in [0, 1]")
        elif self.culture == "interval":
            if self.radius is None or self.radius < 0:
                raise ValueError("interval culture needs a nonnegative base radius")
        elif self.source is None:
            raise ValueError("pabulib culture needs a source file or directory")

    def instantiate(self, m: int, n: int, seed: int) -> "CultureParams":
        return CultureParams(spec=self, m=m, n=n, seed=seed)

    def describe(self) -> str:
        if self.culture == "resampling":
            return f"resampling(p={self.p}, phi={self.phi})"
        if self.culture == "interval":
            return f"interval(r={self.radius:g})"
        return f"pabulib({Path(self.source).name})"

    def to_dict(self) -> dict:
        out: dict = {"culture": self.culture}
        if self.p is not None:
            out["p"] = str(self.p)
        if self.phi is not None:
            out["phi"] = str(self.phi)
        if self.radius is not None:
            out["radius"] = self.radius
        if self.source is not None:
            out["source"] = self.source
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CultureSpec":
        return cls(
            culture=data["culture"],
            p=Fraction(data["p"]) if "p" in data else None,
            phi=Fraction(data["phi"]) if "phi" in data else None,
            radius=float(data["radius"]) if "radius" in data else None,
            source=data.get("source"),
        )


@dataclass(frozen=True)
class CultureParams:
    """A fully specified generation request: culture shape, sizes, seed."""

    spec: CultureSpec
    m: int
    n: int
    seed: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be at least 1")


def _bernoulli_threshold(p: Fraction) -> int:
    # floor(p * 2^64): exact, so the draw u64 < threshold has probability p.
    return (p.numerator << 64) // p.denominator


def _uniform01(rng: random.Random) -> float:
    return rng.getrandbits(53) / _U53


def _standard_normal(rng: random.Random) -> float:
    u1 = (rng.getrandbits(53) + 1) / _U53  # in (0, 1], keeps log finite
    u2 = rng.getrandbits(53) / _U53
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def gen_resampling(params: CultureParams) -> Election:
    """Resampling-model election, fully determined by the seed."""
    spec = params.spec
    if spec.culture != "resampling":
        raise ValueError("params are not for the resampling culture")
    m, n = params.m, params.n
    rng = random.Random(params.seed)
    central_size = int(spec.p * m)  # floor(p*m), exact on Fractions
    central = set(rng.sample(range(m), central_size))
    resample_threshold = _bernoulli_threshold(spec.phi)
    approve_threshold = _bernoulli_threshold(spec.p)
    votes = []
    for _ in range(n):
        vote = []
        for c in range(m):
            if rng.getrandbits(64) < resample_threshold:
                if rng.getrandbits(64) < approve_threshold:
                    vote.append(c)
            elif c in central:
                vote.append(c)
        votes.append(vote)
    return Election(m, votes)


def gen_interval(params: CultureParams) -> Election:
    """Interval-model election: 1-D spatial points with per-candidate radii."""
    spec = params.spec
    if spec.culture != "interval":
        raise ValueError("params are not for the interval culture")
    m, n = params.m, params.n
    rng = random.Random(params.seed)
    voter_points = [_uniform01(rng) for _ in range(n)]
    candidate_points = [_uniform01(rng) for _ in range(m)]
    base = spec.radius
    radii = [max(0.0, base + (base / 2.0) * _standard_normal(rng)) for _ in range(m)]
    votes = [
        [c for c in range(m) if abs(pv - candidate_points[c]) <= radii[c]]
        for pv in voter_points
    ]
    return Election(m, votes)


@dataclass(frozen=True)
class PBInstance:
    """A parsed participatory-budgeting file: projects, approval votes, metadata."""

    project_ids: tuple[str, ...]
    votes: tuple[frozenset[str], ...]
    metadata: dict

    def __post_init__(self):
        if not self.project_ids:
            raise ValueError("PB instance needs at least one project")
        if not self.votes:
            raise ValueError("PB instance needs at least one vote")


def parse_pabulib(text: str) -> PBInstance:
    """Parse the semicolon-delimited PB format (META / PROJECTS / VOTES)."""
    section = None
    columns: list[str] = []
    metadata: dict = {}
    project_ids: list[str] = []
    project_set: set[str] = set()
    votes: list[frozenset[str]] = []
    seen_sections: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.upper() in ("META", "PROJECTS", "VOTES"):
            section = line.upper()
            seen_sections.add(section)
            columns = []
            continue
        if section is None:
            raise ElectionFormatError(f"data before any section header: {line!r}", line=lineno)
        cells = [cell.strip() for cell in line.split(";")]
        if not columns:
            columns = [c.lower() for c in cells]
            if section == "PROJECTS" and "project_id" not in columns:
                raise ElectionFormatError("PROJECTS section lacks a project_id column", line=lineno)
            if section == "VOTES" and "vote" not in columns:
                raise ElectionFormatError("VOTES section lacks a vote column", line=lineno)
            continue
        if section == "META":
            if len(cells) >= 2:
                metadata[cells[0]] = cells[1]
            continue
        row = dict(zip(columns, cells))
        if section == "PROJECTS":
            pid = row.get("project_id", "")
            if not pid:
                raise ElectionFormatError("missing project_id", line=lineno)
            if pid in project_set:
                raise ElectionFormatError(f"duplicate project {pid!r}", line=lineno)
            if "cost" in row and row["cost"]:
                try:
                    float(row["cost"])  # validated, then deliberately discarded
                except ValueError:
                    raise ElectionFormatError(f"bad cost {row['cost']!r}", line=lineno) from None
            project_ids.append(pid)
            project_set.add(pid)
        else:
            vote_field = row.get("vote", "")
            approved = frozenset(p.strip() for p in vote_field.split(",") if p.strip())
            for pid in approved:
                if pid not in project_set:
                    raise ElectionFormatError(f"vote references unknown project {pid!r}", line=lineno)
            votes.append(approved)
    for required in ("PROJECTS", "VOTES"):
        if required not in seen_sections:
            raise ElectionFormatError(f"missing {required} section")
    return PBInstance(tuple(project_ids), tuple(votes), metadata)


def subsample_pabulib(pb: PBInstance, m: int, n: int, seed: int) -> Election:
    """Top-m projects by approval count, then n voter draws with replacement.

    Ties at the top-m cutoff break by project declaration order.  Only
    voters approving at least one kept project are drawn from, so every
    output vote is nonempty.  Candidate index 0 is the most-approved kept
    project.
    """
    if len(pb.project_ids) < m:
        raise ValueError(f"PB instance has {len(pb.project_ids)} projects, need {m}")
    counts = {pid: 0 for pid in pb.project_ids}
    for vote in pb.votes:
        for pid in vote:
            counts[pid] += 1
    declaration = {pid: i for i, pid in enumerate(pb.project_ids)}
    kept = sorted(pb.project_ids, key=lambda pid: (-counts[pid], declaration[pid]))[:m]
    index = {pid: i for i, pid in enumerate(kept)}
    eligible = [vote for vote in pb.votes if any(pid in index for pid in vote)]
    if not eligible:
        raise ValueError("no voter approves any of the kept projects")
    rng = random.Random(seed)
    votes = []
    for _ in range(n):
        vote = eligible[rng.randrange(len(eligible))]
        votes.append(sorted(index[pid] for pid in vote if pid in index))
    return Election(m, votes)


@functools.lru_cache(maxsize=32)
def _load_pb_file(path: str) -> PBInstance:
    return parse_pabulib(Path(path).read_text(encoding="utf-8"))


def gen_pabulib(params: CultureParams) -> Election:
    """Election sampled from a PB file, or from a random file of a directory."""
    spec = params.spec
    if spec.culture != "pabulib":
        raise ValueError("params are not for the pabulib culture")
    rng = random.Random(params.seed)
    source = Path(spec.source)
    if source.is_dir():
        files = sorted(str(p) for p in source.glob("*.pb"))
        if not files:
            raise ValueError(f"no .pb files in {source}")
        path = files[rng.randrange(len(files))]
    else:
        path = str(source)
    sub_seed = rng.getrandbits(64)
    return subsample_pabulib(_load_pb_file(path), params.m, params.n, sub_seed)


def generate(params: CultureParams) -> Election:
    """Dispatch to the generator named by the culture tag."""
    return {
        "resampling": gen_resampling,
        "interval": gen_interval,
        "pabulib": gen_pabulib,
    }[params.spec.culture](params)


def calibrate_interval_radius(
    m: int,
    target_mean_approvals: float,
    seed: int,
    samples: int = 10_000,
    tolerance: float = 0.05,
) -> float:
    """Base radius whose mean approvals per vote hits the target within 5%.

    Monte-Carlo bisection with common random numbers: one set of
    (voter point, candidate point, normal deviate) triples is reused for
    every candidate radius, making the estimate monotone in r and the
    result deterministic per seed.
    """
    if not 0 < target_mean_approvals <= m:
        raise ValueError("target mean approvals must lie in (0, m]")
    rng = random.Random(seed)
    triples = [
        (_uniform01(rng), _uniform01(rng), _standard_normal(rng)) for _ in range(samples)
    ]

    def mean_approvals(r: float) -> float:
        hits = sum(
            1 for pv, pc, z in triples if abs(pv - pc) <= max(0.0, r + (r / 2.0) * z)
        )
        return m * hits / samples

    lo, hi = 0.0, 0.25
    while mean_approvals(hi) < target_mean_approvals:
        hi *= 2.0
        if hi > 64.0:
            raise ValueError("cannot reach the target mean approvals")
    for _ in range(60):
        mid = (lo + hi) / 2.0
        estimate = mean_approvals(mid)
        if abs(estimate - target_mean_approvals) <= tolerance * target_mean_approvals:
            return mid
        if estimate < target_mean_approvals:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0
