"""Directed graphs as a pair of partitioned datasets, and the sample contract."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataflow import Batch, ExecutionContext, PartitionedDataset

DEGREE_MODES = ("in", "out", "total")


def _ids(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64)
    return arr.reshape(-1)


@dataclass(frozen=True)
class Graph:
    """Vertices carry an ``id`` column; edges carry ``id``, ``source``, ``target``.

    Self-loops and parallel edges (distinct edge ids) are allowed.
    """

    vertices: PartitionedDataset
    edges: PartitionedDataset

    @property
    def context(self) -> ExecutionContext:
        return self.vertices.context

    @classmethod
    def from_arrays(
        cls,
        context: ExecutionContext,
        sources,
        targets,
        vertex_ids=None,
        edge_ids=None,
    ) -> Graph:
        """Build a graph; vertices default to the distinct edge endpoints and
        edge ids default to ``0..m-1`` in input order."""
        sources = _ids(sources)
        targets = _ids(targets)
        if len(sources) != len(targets):
            raise ValueError("sources and targets differ in length")
        if edge_ids is None:
            edge_ids = np.arange(len(sources), dtype=np.int64)
        else:
            edge_ids = _ids(edge_ids)
        if vertex_ids is None:
            vertex_ids = np.unique(np.concatenate([sources, targets]))
        else:
            vertex_ids = _ids(vertex_ids)
        vertices = PartitionedDataset.from_columns(context, {"id": vertex_ids}, key="id")
        edges = PartitionedDataset.from_columns(
            context, {"id": edge_ids, "source": sources, "target": targets}, key="id"
        )
        return cls(vertices, edges)

    @classmethod
    def from_edge_pairs(cls, context: ExecutionContext, pairs, vertex_ids=None) -> Graph:
        pairs = list(pairs)
        src = [p[0] for p in pairs]
        tgt = [p[1] for p in pairs]
        return cls.from_arrays(context, src, tgt, vertex_ids=vertex_ids)

    @classmethod
    def empty(cls, context: ExecutionContext) -> Graph:
        return cls.from_arrays(context, [], [], vertex_ids=[])

    def num_vertices(self) -> int:
        return self.vertices.count()

    def num_edges(self) -> int:
        return self.edges.count()

    def vertex_ids(self) -> np.ndarray:
        """All vertex ids, sorted."""
        return np.sort(self.vertices.collect()["id"])

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(ids, sources, targets)`` ordered by edge id."""
        batch = self.edges.collect()
        order = np.argsort(batch["id"], kind="stable")
        return batch["id"][order], batch["source"][order], batch["target"][order]

    def with_context(self, context: ExecutionContext) -> Graph:
        """The same graph redistributed for another context."""
        ids, src, tgt = self.edge_arrays()
        return Graph.from_arrays(context, src, tgt, vertex_ids=self.vertex_ids(), edge_ids=ids)

    def check_integrity(self) -> None:
        """Raise ``ValueError`` on dangling edge endpoints or duplicate ids."""
        vids = self.vertex_ids()
        if len(vids) and np.any(vids[1:] == vids[:-1]):
            raise ValueError("duplicate vertex ids")
        ids, src, tgt = self.edge_arrays()
        if len(ids) and np.any(ids[1:] == ids[:-1]):
            raise ValueError("duplicate edge ids")
        for name, ends in (("source", src), ("target", tgt)):
            missing = ends[~np.isin(ends, vids)]
            if len(missing):
                raise ValueError(f"edge {name} {int(missing.min())} is not a vertex")

    def __repr__(self) -> str:
        return f"Graph(|V|={self.num_vertices()}, |E|={self.num_edges()})"


@dataclass(frozen=True)
class SampleCheck:
    """Outcome of :func:`validate_sample`; truthy when the sample is valid."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _count_matches(d: PartitionedDataset, other: PartitionedDataset, key: str, other_key: str):
    return d.join(other, lambda l, r: l, left_key=key, right_key=other_key)


def _first_missing(wanted: np.ndarray, found: np.ndarray) -> int:
    return int(np.setdiff1d(wanted, found).min())


def validate_sample(original: Graph, sample: Graph) -> SampleCheck:
    """Check ``V_S ⊆ V``, ``E_S ⊆ E`` (by id, with matching endpoints) and
    endpoint closure of ``E_S`` over ``V_S``."""
    sv = sample.vertices.count()
    kept_v = _count_matches(sample.vertices, original.vertices, "id", "id")
    if kept_v.count() != sv:
        bad = _first_missing(sample.vertex_ids(), kept_v.collect()["id"])
        return SampleCheck(False, f"vertex {bad} is not in the original graph")

    orig_edges = original.edges.map(
        lambda b: b.rename(id="oid", source="osource", target="otarget")
    )
    same = sample.edges.join(
        orig_edges,
        lambda l, r: l.take((l["source"] == r["osource"]) & (l["target"] == r["otarget"])),
        left_key="id",
        right_key="oid",
    )
    if same.count() != sample.edges.count():
        bad = _first_missing(sample.edge_arrays()[0], same.collect()["id"])
        return SampleCheck(False, f"edge {bad} is not an edge of the original graph")

    closed = induced_edges(sample, sample.vertices)
    if closed.count() != sample.edges.count():
        bad = _first_missing(sample.edge_arrays()[0], closed.collect()["id"])
        return SampleCheck(False, f"edge {bad} has an endpoint outside the sampled vertices")
    return SampleCheck(True)


def induced_edges(g: Graph, kept_vertices: PartitionedDataset) -> PartitionedDataset:
    """Edges whose source and target both appear in ``kept_vertices`` (``id`` column).

    Two joins: edges on source, then the survivors on target.
    """
    kept = kept_vertices.map(lambda b: b.select("id"))
    by_source = g.edges.join(kept, lambda e, v: e, left_key="source", right_key="id")
    return by_source.join(kept, lambda e, v: e, left_key="target", right_key="id")


def endpoint_vertices(edges: PartitionedDataset) -> PartitionedDataset:
    """Distinct ids appearing as source or target."""
    sources = edges.map(lambda b: Batch({"id": b["source"]}))
    targets = edges.map(lambda b: Batch({"id": b["target"]}))
    return sources.union(targets).distinct("id")


def remove_zero_degree(g: Graph) -> Graph:
    touched = endpoint_vertices(g.edges)
    vertices = g.vertices.join(touched, lambda v, t: v, left_key="id", right_key="id")
    return Graph(vertices, g.edges)


def degree_dataset(g: Graph, mode: str = "total") -> PartitionedDataset:
    """``(id, degree)`` for every vertex, zero-degree vertices included."""
    if mode not in DEGREE_MODES:
        raise ValueError(f"unknown degree mode {mode!r}; expected one of {DEGREE_MODES}")
    zeros = g.vertices.map(
        lambda b: Batch({"id": b["id"], "degree": np.zeros(len(b), dtype=np.int64)})
    )
    parts = [zeros]
    ends = {"out": ("source",), "in": ("target",), "total": ("source", "target")}[mode]
    for col in ends:
        parts.append(
            g.edges.map(
                lambda b, c=col: Batch({"id": b[c], "degree": np.ones(len(b), dtype=np.int64)})
            )
        )
    merged = parts[0]
    for extra in parts[1:]:
        merged = merged.union(extra)
    return merged.reduce_by_key("id", np.add)
