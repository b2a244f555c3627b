"""Random vertex (RV), random edge (RE) and random vertex neighborhood (RVN)
sampling as compositions of filter, map and join."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dataflow import Batch
from .graph import Graph, endpoint_vertices, induced_edges, remove_zero_degree
from .hashing import unit_interval, unit_interval_array

ALGORITHMS = ("rv", "re", "rvn", "rw")


class SamplingParameterError(ValueError):
    pass


class NeighborhoodDirection(enum.Enum):
    INCOMING = "in"
    OUTGOING = "out"
    BOTH = "both"

    @classmethod
    def parse(cls, value) -> NeighborhoodDirection:
        if isinstance(value, cls):
            return value
        aliases = {"incoming": "in", "outgoing": "out"}
        try:
            return cls(aliases.get(value, value))
        except ValueError:
            raise SamplingParameterError(
                f"unknown direction {value!r}; expected in, out or both"
            ) from None


def check_sample_size(s: float) -> float:
    s = float(s)
    if math.isnan(s) or not 0.0 <= s <= 1.0:
        raise SamplingParameterError(f"sample size must be in [0, 1], got {s}")
    return s


@dataclass(frozen=True)
class SampleConfig:
    algorithm: str
    s: float
    seed: int = 0
    direction: NeighborhoodDirection = NeighborhoodDirection.BOTH
    walkers: int = 1
    jump_probability: float = 0.1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise SamplingParameterError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}"
            )
        check_sample_size(self.s)
        object.__setattr__(self, "direction", NeighborhoodDirection.parse(self.direction))
        if self.walkers < 1:
            raise SamplingParameterError(f"walkers must be >= 1, got {self.walkers}")
        j = float(self.jump_probability)
        if math.isnan(j) or not 0.0 <= j <= 1.0:
            raise SamplingParameterError(f"jump probability must be in [0, 1], got {j}")


def keep_decision(element_id: int, seed: int, s: float) -> bool:
    """True iff the element's hash-derived draw r in (0, 1] satisfies r <= s."""
    return unit_interval(seed, element_id) <= s


def keep_mask(ids: np.ndarray, seed: int, s: float) -> np.ndarray:
    """Vectorized :func:`keep_decision`."""
    return unit_interval_array(seed, ids) <= s


def random_vertex_sample(g: Graph, s: float, seed: int) -> Graph:
    s = check_sample_size(s)
    kept = g.vertices.filter(lambda b: keep_mask(b["id"], seed, s))
    edges = induced_edges(g, kept)
    return remove_zero_degree(Graph(kept, edges))


def random_edge_sample(g: Graph, s: float, seed: int) -> Graph:
    s = check_sample_size(s)
    edges = g.edges.filter(lambda b: keep_mask(b["id"], seed, s))
    return Graph(endpoint_vertices(edges), edges)


def random_vertex_neighborhood_sample(
    g: Graph, s: float, seed: int, direction=NeighborhoodDirection.BOTH
) -> Graph:
    s = check_sample_size(s)
    direction = NeighborhoodDirection.parse(direction)
    flagged = g.vertices.map(
        lambda b: b.with_columns(sampled=keep_mask(b["id"], seed, s))
    )
    with_source = g.edges.join(
        flagged,
        lambda e, v: e.with_columns(source_sampled=v["sampled"]),
        left_key="source",
        right_key="id",
    )
    tuples = with_source.join(
        flagged,
        lambda e, v: e.with_columns(target_sampled=v["sampled"]),
        left_key="target",
        right_key="id",
    )
    use_out = direction in (NeighborhoodDirection.OUTGOING, NeighborhoodDirection.BOTH)
    use_in = direction in (NeighborhoodDirection.INCOMING, NeighborhoodDirection.BOTH)

    def matches(b: Batch) -> np.ndarray:
        keep = np.zeros(len(b), dtype=bool)
        if use_out:
            keep |= b["source_sampled"]
        if use_in:
            keep |= b["target_sampled"]
        return keep

    edges = tuples.filter(matches).map(lambda b: b.select("id", "source", "target"))
    vertices = endpoint_vertices(edges)
    return remove_zero_degree(Graph(vertices, edges))


def sample(g: Graph, config: SampleConfig) -> Graph:
    """Dispatch on ``config.algorithm``."""
    if config.algorithm == "rv":
        return random_vertex_sample(g, config.s, config.seed)
    if config.algorithm == "re":
        return random_edge_sample(g, config.s, config.seed)
    if config.algorithm == "rvn":
        return random_vertex_neighborhood_sample(g, config.s, config.seed, config.direction)
    from .randomwalk import WalkParams, random_walk_sample

    params = WalkParams(
        s=config.s,
        walkers=config.walkers,
        jump_probability=config.jump_probability,
        seed=config.seed,
    )
    return random_walk_sample(g, params)
