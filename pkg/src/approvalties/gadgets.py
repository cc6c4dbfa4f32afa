"""Election generators with analytic ground truth, built from graphs.

The independent-set gadget produces an election whose optimal committees
under a 1-concave Thiele rule correspond exactly to the size-k
independent sets of an augmented graph; the matching gadget produces an
election pair whose universe counts under greedy Thiele rules and
Phragmen differ by the number of size-k matchings.  Both come with
brute-force graph counters so generated instances carry known answers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ElectionFormatError
from .model import Election, WeightFunction

BRUTE_FORCE_VERTEX_LIMIT = 20


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: ``num_vertices`` and an edge list."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, num_vertices: int, edges):
        normalized = []
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            edge = (min(u, v), max(u, v))
            if edge in seen:
                raise ValueError(f"duplicate edge {edge}")
            seen.add(edge)
            normalized.append(edge)
        object.__setattr__(self, "num_vertices", num_vertices)
        object.__setattr__(self, "edges", tuple(normalized))

    def degrees(self) -> list[int]:
        degree = [0] * self.num_vertices
        for u, v in self.edges:
            degree[u] += 1
            degree[v] += 1
        return degree

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in set(self.edges)


def parse_graph(text: str) -> Graph:
    """Parse the graph format: ``p <vertices> <edges>`` then ``e <u> <v>`` lines."""
    num_vertices = None
    declared_edges = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if num_vertices is None:
            if tokens[0] != "p" or len(tokens) != 3:
                raise ElectionFormatError(f"expected 'p <vertices> <edges>', got {line!r}", line=lineno)
            num_vertices, declared_edges = int(tokens[1]), int(tokens[2])
            continue
        if tokens[0] != "e" or len(tokens) != 3:
            raise ElectionFormatError(f"expected 'e <u> <v>', got {line!r}", line=lineno)
        edges.append((int(tokens[1]), int(tokens[2])))
    if num_vertices is None:
        raise ElectionFormatError("missing 'p' header")
    if declared_edges != len(edges):
        raise ElectionFormatError(f"declared {declared_edges} edges but found {len(edges)}")
    return Graph(num_vertices, edges)


def serialize_graph(graph: Graph) -> str:
    lines = [f"p {graph.num_vertices} {len(graph.edges)}"]
    lines.extend(f"e {u} {v}" for u, v in graph.edges)
    return "\n".join(lines) + "\n"


class IndependentSetGadget(NamedTuple):
    election: Election
    committee_size: int
    augmented: Graph


class MatchingGadget(NamedTuple):
    election: Election
    election_p: Election
    size_shift: int


def _dummy_lift(weights: WeightFunction) -> int:
    """Number of extra all-approved candidates needed when delta_2 = 1.

    Returns t - 1 for the smallest t with delta_t = 1 > delta_{t+1};
    zero when delta_2 < 1 already.  Rejects AV (all increments 1).
    """
    increments = weights.increments
    if len(increments) >= 2 and increments[1] < 1:
        return 0
    for t in range(1, len(increments)):
        if increments[t - 1] == 1 and increments[t] < 1:
            return t - 1
    raise ValueError(
        "weight function behaves like AV on all supplied increments; "
        "the gadget constructions exclude AV"
    )


def augment_with_clique_neighbors(graph: Graph, k: int) -> Graph:
    """Add k new vertices adjacent to every old vertex but not to each other."""
    total = graph.num_vertices + k
    edges = list(graph.edges)
    for new in range(graph.num_vertices, total):
        edges.extend((old, new) for old in range(graph.num_vertices))
    return Graph(total, edges)


def gen_is_gadget(graph: Graph, k: int, weights: WeightFunction) -> IndependentSetGadget:
    """Election whose optimal committees are the size-k independent sets of G'.

    G' is the input graph plus k universally connected new vertices.  The
    election has one voter per edge of G' (approving both endpoints) and
    max_degree - degree(v) single-approval voters per vertex v.  When
    delta_2 = 1 the construction adds all-approved dummy candidates and
    grows the committee size accordingly.
    """
    if k < 1:
        raise ValueError("committee size must be at least 1")
    extra = _dummy_lift(weights)
    committee_size = k + extra
    if weights.max_committee_size() < committee_size:
        raise ValueError("weight function has fewer increments than the committee size")
    augmented = augment_with_clique_neighbors(graph, k)
    degrees = augmented.degrees()
    max_degree = max(degrees)
    votes: list[list[int]] = []
    for u, v in augmented.edges:
        votes.append([u, v])
    for v in range(augmented.num_vertices):
        votes.extend([[v]] * (max_degree - degrees[v]))
    num_candidates = augmented.num_vertices + extra
    if extra:
        dummies = list(range(augmented.num_vertices, num_candidates))
        votes = [vote + dummies for vote in votes]
    return IndependentSetGadget(Election(num_candidates, votes), committee_size, augmented)


def gen_matching_gadget(graph: Graph, weights: WeightFunction | None = None) -> MatchingGadget:
    """Election pair (E, E_p) for the matching-count identity.

    E has one candidate per edge, one voter per vertex, each edge
    candidate approved by its two endpoint voters.  E_p adds a candidate
    p approved by two fresh voters.  With a weight function whose
    delta_2 = 1, all-approved dummy candidates are added to both
    elections and ``size_shift`` reports how far committee sizes move.
    """
    if not graph.edges:
        raise ValueError("the matching gadget needs at least one edge")
    extra = _dummy_lift(weights) if weights is not None else 0
    num_edges = len(graph.edges)
    votes: list[list[int]] = [[] for _ in range(graph.num_vertices)]
    for index, (u, v) in enumerate(graph.edges):
        votes[u].append(index)
        votes[v].append(index)
    votes_p = [list(vote) for vote in votes] + [[num_edges], [num_edges]]
    if extra:
        dummies = list(range(num_edges, num_edges + extra))
        votes = [vote + dummies for vote in votes]
        dummies_p = list(range(num_edges + 1, num_edges + 1 + extra))
        votes_p = [vote + dummies_p for vote in votes_p]
    election = Election(num_edges + extra, votes)
    election_p = Election(num_edges + 1 + extra, votes_p)
    return MatchingGadget(election, election_p, extra)


def count_independent_sets(graph: Graph, k: int) -> int:
    """Number of size-k independent sets, by exhaustive enumeration."""
    if graph.num_vertices > BRUTE_FORCE_VERTEX_LIMIT:
        raise ValueError("graph too large for brute force")
    adjacency = set(graph.edges)
    count = 0
    for subset in itertools.combinations(range(graph.num_vertices), k):
        if all(
            (u, v) not in adjacency for u, v in itertools.combinations(subset, 2)
        ):
            count += 1
    return count


def count_matchings(graph: Graph, k: int) -> int:
    """Number of size-k matchings (edge sets with pairwise disjoint endpoints)."""
    if graph.num_vertices > BRUTE_FORCE_VERTEX_LIMIT:
        raise ValueError("graph too large for brute force")
    count = 0
    for subset in itertools.combinations(graph.edges, k):
        vertices = [v for edge in subset for v in edge]
        if len(set(vertices)) == 2 * k:
            count += 1
    return count
