import random

import pytest

from approvalties.model import Election


@pytest.fixture
def e1() -> Election:
    """Four voters over three candidates; the shared worked example."""
    return Election(3, [{0, 1}, {0}, {1}, {2}])


def random_election(rng: random.Random, max_m: int = 8, max_n: int = 12) -> Election:
    """Small random election; empty votes occur with positive probability."""
    m = rng.randint(1, max_m)
    n = rng.randint(1, max_n)
    density = rng.uniform(0.15, 0.85)
    votes = [
        [c for c in range(m) if rng.random() < density]
        for _ in range(n)
    ]
    return Election(m, votes)


def random_graph(rng: random.Random, max_vertices: int, edge_probability=None):
    from approvalties.gadgets import Graph

    num_vertices = rng.randint(1, max_vertices)
    p = edge_probability if edge_probability is not None else rng.uniform(0.2, 0.7)
    edges = [
        (u, v)
        for u in range(num_vertices)
        for v in range(u + 1, num_vertices)
        if rng.random() < p
    ]
    return Graph(num_vertices, edges)
