import random

import pytest

from rosmatch.graph import Graph, make_graph


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return make_graph(n, edges)


def random_bipartite(rng: random.Random, left: int, right: int, p: float) -> Graph:
    n = left + right
    edges = [(u, left + v) for u in range(left) for v in range(right) if rng.random() < p]
    return make_graph(n, edges, sides=[0] * left + [1] * right)


@pytest.fixture
def rng():
    return random.Random(20240611)
