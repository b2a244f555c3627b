"""Bulk-synchronous vertex-centric iteration.

Vertices are spread over the partitions of the graph's vertex dataset. In
each superstep every active vertex, and every vertex with mail, runs
``compute``; messages it emits become visible only in the next superstep.
Inboxes are sorted by sender id so results do not depend on the shuffle.

Superstep 0 is initialization: ``init`` runs on every vertex and may already
emit messages and aggregator contributions.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, NamedTuple, Sequence

from .graph import Graph


class UnknownVertexError(KeyError):
    def __init__(self, vertex_id: int, sender: int):
        super().__init__(vertex_id)
        self.vertex_id = vertex_id
        self.sender = sender

    def __str__(self) -> str:
        return f"message from vertex {self.sender} to nonexistent vertex {self.vertex_id}"


class Step(NamedTuple):
    """What a vertex returns from ``init`` or ``compute``.

    ``active=False`` is a vote to halt; an incoming message reactivates the
    vertex.
    """

    state: Any
    messages: Sequence[tuple[int, Any]] = ()
    aggregate: Mapping[str, int] | None = None
    active: bool = False


@dataclass(frozen=True)
class Aggregator:
    combine: Callable[[int, int], int] = operator.add
    initial: int = 0
    # persistent aggregators keep folding across supersteps
    persistent: bool = False


@dataclass
class BspResult:
    states: dict[int, Any]
    supersteps: int
    converged: bool
    aggregates: dict[str, int] = field(default_factory=dict)
    history: list[dict[str, int]] = field(default_factory=list)


def _fold(aggregators, partials: list[dict[str, int]], start=None) -> dict[str, int]:
    out = {name: agg.initial for name, agg in aggregators.items()}
    out.update(start or {})
    for part in partials:
        for name, value in part.items():
            if name not in aggregators:
                raise KeyError(f"contribution to unregistered aggregator {name!r}")
            out[name] = aggregators[name].combine(out[name], value)
    return out


def _absorb(aggregators, local: dict[str, int], contribution) -> None:
    if not contribution:
        return
    for name, value in contribution.items():
        if name in local:
            local[name] = aggregators[name].combine(local[name], value)
        else:
            local[name] = value


def run_bsp(
    g: Graph,
    init: Callable[[int], Step],
    compute: Callable[[int, Any, list, int, Mapping[str, int]], Step],
    halt: Callable[[Mapping[str, int], int], bool] | None = None,
    aggregators: Mapping[str, Aggregator] | None = None,
    max_supersteps: int | None = None,
) -> BspResult:
    """Run a vertex program to termination.

    ``compute(vertex_id, state, inbox, superstep, aggregates)`` sees its inbox as
    a list of ``(sender, payload)`` sorted by sender and the aggregates folded
    at the end of the previous superstep. Terminates when ``halt`` is true
    after a superstep (also checked after init), on quiescence, or after
    ``max_supersteps`` (default ``100 * |V|``) with ``converged=False``.
    """
    ctx = g.context
    aggregators = dict(aggregators or {})
    vertices = g.vertices.repartition_by_key("id")
    partitions = [p["id"].tolist() for p in vertices.partitions]
    n_parts = len(partitions)
    if max_supersteps is None:
        max_supersteps = max(1, 100 * sum(len(p) for p in partitions))

    def owner(vid: int) -> int:
        return vid % n_parts

    def initialize(vids):
        states, active, outbox, local = {}, set(), [], {}
        for vid in vids:
            step = init(vid)
            states[vid] = step.state
            if step.active:
                active.add(vid)
            for target, payload in step.messages:
                outbox.append((target, vid, payload))
            _absorb(aggregators, local, step.aggregate)
        return states, active, outbox, local

    init_out = ctx.run(initialize, partitions)
    states = [o[0] for o in init_out]
    active = [o[1] for o in init_out]
    aggregates = _fold(aggregators, [o[3] for o in init_out])
    running = {k: v for k, v in aggregates.items() if aggregators[k].persistent}
    history = [dict(aggregates)]

    def route(outboxes) -> list[dict[int, list]]:
        inboxes: list[dict[int, list]] = [{} for _ in range(n_parts)]
        for outbox in outboxes:
            for target, sender, payload in outbox:
                p = owner(target)
                if target not in states[p]:
                    raise UnknownVertexError(target, sender)
                inboxes[p].setdefault(target, []).append((sender, payload))
        for box in inboxes:
            for msgs in box.values():
                msgs.sort(key=operator.itemgetter(0))
        return inboxes

    inboxes = route([o[2] for o in init_out])
    if halt is not None and halt(aggregates, 0):
        return BspResult(_merge(states), 0, True, aggregates, history)

    superstep = 0
    while superstep < max_supersteps:
        if not any(active) and not any(inboxes):
            return BspResult(_merge(states), superstep, True, aggregates, history)
        superstep += 1
        visible = dict(aggregates)

        def step_partition(p: int, _superstep=superstep, _visible=visible):
            part_states = states[p]
            box = inboxes[p]
            todo = sorted(active[p].union(box))
            next_active, outbox, local = set(), [], {}
            for vid in todo:
                step = compute(vid, part_states[vid], box.get(vid, []), _superstep, _visible)
                part_states[vid] = step.state
                if step.active:
                    next_active.add(vid)
                for target, payload in step.messages:
                    outbox.append((target, vid, payload))
                _absorb(aggregators, local, step.aggregate)
            return next_active, outbox, local

        results = ctx.run(step_partition, range(n_parts))
        active = [r[0] for r in results]
        inboxes = route([r[1] for r in results])
        aggregates = _fold(aggregators, [r[2] for r in results], start=running)
        running = {k: aggregates[k] for k in running}
        history.append(dict(aggregates))
        if halt is not None and halt(aggregates, superstep):
            return BspResult(_merge(states), superstep, True, aggregates, history)

    if not any(active) and not any(inboxes):
        return BspResult(_merge(states), superstep, True, aggregates, history)
    return BspResult(_merge(states), superstep, False, aggregates, history)


def _merge(states: list[dict[int, Any]]) -> dict[int, Any]:
    merged = {}
    for part in states:
        merged.update(part)
    return merged
