import numpy as np
import pytest

from graphsampling.dataflow import ExecutionContext
from graphsampling.graph import Graph

PARALLELISM = (1, 2, 4, 8)


@pytest.fixture(params=PARALLELISM, ids=lambda p: f"P{p}")
def ctx(request):
    with ExecutionContext(parallelism=request.param, seed=11) as c:
        yield c


@pytest.fixture
def ctx1():
    with ExecutionContext(parallelism=1) as c:
        yield c


def triangle(ctx):
    return Graph.from_edge_pairs(ctx, [(1, 2), (2, 3), (3, 1)])


def random_multigraph(ctx, rng, max_vertices=30, loops=True, parallels=True):
    """Erdos-Renyi style directed graph with optional self-loops and duplicates."""
    n = int(rng.integers(1, max_vertices + 1))
    p = float(rng.choice([0.05, 0.15, 0.3, 0.6, 0.9]))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
    if loops:
        pairs += [(u, u) for u in range(n) if rng.random() < 0.1]
    if parallels and pairs:
        extra = rng.integers(0, len(pairs), size=int(rng.integers(0, 4)))
        pairs += [pairs[i] for i in extra]
    order = rng.permutation(len(pairs))
    pairs = [pairs[i] for i in order]
    vertex_ids = np.arange(n) * 7 + 3  # sparse ids exercise the dense remapping
    pairs = [(int(vertex_ids[u]), int(vertex_ids[v])) for u, v in pairs]
    return Graph.from_edge_pairs(ctx, pairs, vertex_ids=vertex_ids), pairs
