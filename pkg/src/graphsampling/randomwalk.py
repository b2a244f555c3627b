"""Multi-walker random walk sampling (RW) hosted on the BSP engine.

Walkers live in messages. A vertex that receives walkers marks itself
visited and moves each of them on within the same superstep, either along a
not-yet-traversed outgoing edge or by a jump to a uniformly chosen other
vertex. Start vertices move their walkers during initialization, so a walk
that discovers one new vertex per superstep needs ``target - k`` supersteps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .dataflow import Batch
from .graph import Graph, induced_edges, remove_zero_degree
from .hashing import hash_array, hash_words, unit_interval
from .pregel import Aggregator, BspResult, Step, run_bsp
from .sampling import SamplingParameterError, check_sample_size

STREAM_START = 1
STREAM_JUMP = 2
STREAM_TARGET = 3
STREAM_EDGE = 4

WALK = "walk"
JUMP = "jump"


class WalkNotConverged(RuntimeError):
    def __init__(self, visited: int, target: int, supersteps: int):
        super().__init__(
            f"random walk stopped after {supersteps} supersteps with "
            f"{visited} of {target} vertices visited"
        )
        self.visited = visited
        self.target = target
        self.supersteps = supersteps


class WalkerMessage(NamedTuple):
    walker: int
    kind: str


@dataclass(slots=True)
class WalkVertexState:
    visited: bool = False
    traversed: set = field(default_factory=set)
    # number of walker arrivals, start placement included
    visits: int = 0


@dataclass(frozen=True)
class WalkParams:
    s: float
    walkers: int = 1
    jump_probability: float = 0.1
    seed: int = 0
    max_supersteps: int | None = None

    def __post_init__(self):
        check_sample_size(self.s)
        if self.walkers < 1:
            raise SamplingParameterError(f"walkers must be >= 1, got {self.walkers}")
        j = float(self.jump_probability)
        if math.isnan(j) or not 0.0 <= j <= 1.0:
            raise SamplingParameterError(f"jump probability must be in [0, 1], got {j}")

    def target(self, num_vertices: int) -> int:
        # decimal reading of s, so 0.1 * 10 is exactly 1
        return math.ceil(Fraction(str(self.s)) * num_vertices)


def start_vertices(g: Graph, k: int, seed: int) -> list[int]:
    """``k`` distinct vertices, uniformly at random: the smallest hash ranks."""

    def smallest(b: Batch) -> Batch:
        h = hash_array(seed, b["id"], STREAM_START)
        order = np.lexsort((b["id"], h))[:k]
        return Batch({"id": b["id"][order], "rank": h[order]})

    cand = g.vertices.map_partitions(smallest).collect()
    order = np.lexsort((cand["id"], cand["rank"]))[:k]
    return cand["id"][order].tolist()


class RandomWalkProgram:
    """Vertex program for the walk; usable directly with :func:`run_bsp`."""

    def __init__(self, g: Graph, walkers: int, jump_probability: float, seed: int):
        self.graph = g
        self.seed = seed
        self.jump_probability = float(jump_probability)
        self.vertex_ids = g.vertex_ids()
        self.num_vertices = len(self.vertex_ids)
        if walkers > self.num_vertices:
            raise SamplingParameterError(
                f"{walkers} walkers need at least as many vertices, graph has {self.num_vertices}"
            )
        eids, src, tgt = g.edge_arrays()
        order = np.lexsort((eids, src))
        self._edge_ids = eids[order]
        self._targets = tgt[order]
        self._lo = np.searchsorted(src[order], self.vertex_ids, side="left")
        self._hi = np.searchsorted(src[order], self.vertex_ids, side="right")
        self.starts = start_vertices(g, walkers, seed)
        self._walkers_at = {}
        for walker, vid in enumerate(self.starts):
            self._walkers_at.setdefault(vid, []).append(walker)
        self._idle = Step(None)

    def _position(self, vid: int) -> int:
        return int(np.searchsorted(self.vertex_ids, vid))

    def _move(self, vid: int, state: WalkVertexState, walker: int, superstep: int):
        pos = self._position(vid)
        lo, hi = int(self._lo[pos]), int(self._hi[pos])
        edge_ids = self._edge_ids[lo:hi].tolist()
        open_edges = [i for i, e in enumerate(edge_ids) if e not in state.traversed]
        u = unit_interval(self.seed, walker, superstep, STREAM_JUMP)
        if u <= self.jump_probability or not open_edges:
            n = self.num_vertices
            if n == 1:
                return vid, WalkerMessage(walker, JUMP)
            r = hash_words(self.seed, walker, superstep, STREAM_TARGET) % (n - 1)
            if r >= pos:
                r += 1
            return int(self.vertex_ids[r]), WalkerMessage(walker, JUMP)
        pick = open_edges[hash_words(self.seed, walker, superstep, STREAM_EDGE) % len(open_edges)]
        state.traversed.add(edge_ids[pick])
        return int(self._targets[lo + pick]), WalkerMessage(walker, WALK)

    def init(self, vid: int) -> Step:
        walkers = self._walkers_at.get(vid)
        if walkers is None:
            return self._idle
        state = WalkVertexState(visited=True, visits=len(walkers))
        messages = [self._move(vid, state, w, 0) for w in walkers]
        return Step(state, messages, {"visited": 1})

    def compute(self, vid, state, inbox, superstep, aggregates) -> Step:
        if state is None:
            state = WalkVertexState()
        newly = 0
        if not state.visited:
            state.visited = True
            newly = 1
        walkers = sorted(msg.walker for _, msg in inbox)
        state.visits += len(walkers)
        messages = [self._move(vid, state, w, superstep) for w in walkers]
        return Step(state, messages, {"visited": newly})

    def run(self, halt=None, max_supersteps=None) -> BspResult:
        return run_bsp(
            self.graph,
            self.init,
            self.compute,
            halt=halt,
            aggregators={"visited": Aggregator(persistent=True)},
            max_supersteps=max_supersteps,
        )


@dataclass
class WalkResult:
    visited: np.ndarray
    supersteps: int
    starts: list[int]
    visited_history: list[int]

    @property
    def visited_count(self) -> int:
        return len(self.visited)


def random_walk(g: Graph, params: WalkParams) -> WalkResult:
    """Walk until at least ``ceil(s * |V|)`` vertices are visited."""
    n = g.num_vertices()
    if n < 1:
        raise SamplingParameterError("random walk needs a graph with at least one vertex")
    if params.walkers > n:
        raise SamplingParameterError(
            f"{params.walkers} walkers need at least as many vertices, graph has {n}"
        )
    target = params.target(n)
    program = RandomWalkProgram(g, params.walkers, params.jump_probability, params.seed)
    max_steps = params.max_supersteps if params.max_supersteps is not None else 100 * n
    result = program.run(
        halt=lambda aggregates, superstep: aggregates["visited"] >= target,
        max_supersteps=max_steps,
    )
    visited = sorted(v for v, st in result.states.items() if st is not None and st.visited)
    if not result.converged:
        raise WalkNotConverged(len(visited), target, result.supersteps)
    return WalkResult(
        visited=np.array(visited, dtype=np.int64),
        supersteps=result.supersteps,
        starts=program.starts,
        visited_history=[h["visited"] for h in result.history],
    )


def random_walk_sample(g: Graph, params: WalkParams) -> Graph:
    """Visited vertices plus the edges among them, zero-degree vertices removed."""
    if params.s == 0:
        return Graph.empty(g.context)
    walk = random_walk(g, params)
    kept = g.vertices.filter(lambda b: np.isin(b["id"], walk.visited))
    return remove_zero_degree(Graph(kept, induced_edges(g, kept)))
