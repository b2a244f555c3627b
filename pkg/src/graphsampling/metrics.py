"""Graph metrics used to judge how well a sample preserves its original.

Counts and degrees are taken on the stored directed multigraph. Triangles,
wedges and neighborhoods are taken on the underlying undirected simple graph
(directions dropped, parallel edges and self-loops collapsed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .dataflow import Batch, PartitionedDataset
from .graph import Graph, degree_dataset
from .pregel import Step, run_bsp

LOCAL_CC_MODES = ("directed", "undirected")
REPORT_FIELDS = (
    "vertex_count",
    "edge_count",
    "density",
    "triangles",
    "global_cc",
    "avg_local_cc",
    "wcc_count",
    "d_avg",
    "d_min",
    "d_max",
)
INTEGER_FIELDS = frozenset(
    {"vertex_count", "edge_count", "triangles", "wcc_count", "d_min", "d_max"}
)
HEAVY_FIELDS = ("triangles", "global_cc", "avg_local_cc")

# candidate wedges checked per vectorized block
_BLOCK = 1 << 22


class UndefinedMetricError(ValueError):
    pass


@dataclass
class _Structure:
    """Dense-index view of the undirected simple graph."""

    vertex_ids: np.ndarray
    pairs: PartitionedDataset  # key, a, b, directions (bit 1: a->b stored, bit 2: b->a)
    degree: np.ndarray  # undirected simple degree, by dense index


def _structure(g: Graph) -> _Structure:
    vids = g.vertex_ids()
    n = len(vids)

    def to_pairs(b: Batch) -> Batch:
        s = np.searchsorted(vids, b["source"])
        t = np.searchsorted(vids, b["target"])
        a = np.minimum(s, t)
        c = np.maximum(s, t)
        bits = np.where(s < t, 1, 2).astype(np.int64)
        return Batch({"key": a * n + c, "a": a, "b": c, "directions": bits})

    pairs = (
        g.edges.filter(lambda b: b["source"] != b["target"])
        .map_partitions(to_pairs)
        .reduce_by_key("key", np.bitwise_or)
    )
    ends = pairs.map_partitions(
        lambda b: Batch({"key": np.concatenate([b["a"], b["b"]])})
    ).collect()["key"]
    degree = np.bincount(ends, minlength=n).astype(np.int64)
    return _Structure(vids, pairs, degree)


def _csr(src: np.ndarray, dst: np.ndarray, n: int):
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=ptr[1:])
    return ptr, dst, order


@dataclass
class TriangleCensus:
    total: int
    per_vertex: np.ndarray  # triangles through each vertex, by dense index
    directed_links: np.ndarray  # stored directed neighbor-neighbor edges per vertex


def triangle_census(g: Graph, structure: _Structure | None = None) -> TriangleCensus:
    """Enumerate every triangle once from its lowest-ranked vertex.

    Ranks order vertices by (simple degree, id); each undirected edge is
    oriented from lower to higher rank, and a triangle x<y<z is found on the
    oriented edge (x, y) by probing x->z for every z in N+(y).
    """
    st = structure or _structure(g)
    n = len(st.vertex_ids)
    pairs = st.pairs.collect()
    a, b, dirs = pairs["a"], pairs["b"], pairs["directions"]
    rank = st.degree * n + np.arange(n, dtype=np.int64)
    low = np.where(rank[a] < rank[b], a, b)
    high = np.where(rank[a] < rank[b], b, a)
    mult = np.where(dirs == 3, 2, 1).astype(np.int64)
    ptr, nbr, order = _csr(low, high, n)
    oriented_keys = low[order] * n + nbr
    mult = mult[order]
    oriented_src = low[order]

    def census(batch: Batch) -> Batch:
        idx = batch["edge"]
        tri = np.zeros(n, dtype=np.int64)
        links = np.zeros(n, dtype=np.int64)
        if len(idx) == 0:
            return Batch({"vertex": np.empty(0, np.int64), "tri": np.empty(0, np.int64),
                          "links": np.empty(0, np.int64)})
        counts = (ptr[nbr[idx] + 1] - ptr[nbr[idx]]).astype(np.int64)
        bounds = np.cumsum(counts)
        start = 0
        while start < len(idx):
            base = bounds[start - 1] if start else 0
            stop = int(np.searchsorted(bounds, base + _BLOCK, side="right"))
            stop = max(stop, start + 1)
            e = idx[start:stop]
            c = counts[start:stop]
            total = int(c.sum())
            if total:
                e_rep = np.repeat(e, c)
                run = np.repeat(np.cumsum(c) - c, c)
                v = nbr[e_rep]
                vw = ptr[v] + (np.arange(total) - run)
                u = oriented_src[e_rep]
                w = nbr[vw]
                probe = u * n + w
                pos = np.searchsorted(oriented_keys, probe)
                pos[pos >= len(oriented_keys)] = 0
                hit = oriented_keys[pos] == probe
                e_hit, vw_hit, uw_hit = e_rep[hit], vw[hit], pos[hit]
                u, v, w = u[hit], v[hit], w[hit]
                for vertex in (u, v, w):
                    tri += np.bincount(vertex, minlength=n)
                links += np.bincount(u, weights=mult[vw_hit], minlength=n).astype(np.int64)
                links += np.bincount(v, weights=mult[uw_hit], minlength=n).astype(np.int64)
                links += np.bincount(w, weights=mult[e_hit], minlength=n).astype(np.int64)
            start = stop
        touched = np.flatnonzero(tri)
        return Batch({"vertex": touched, "tri": tri[touched], "links": links[touched]})

    edges = PartitionedDataset.from_columns(
        st.pairs.context, {"edge": np.arange(len(nbr), dtype=np.int64)},
        num_partitions=st.pairs.num_partitions,
    )
    sums = edges.map_partitions(census).reduce_by_key("vertex", np.add).collect()
    per_vertex = np.zeros(n, dtype=np.int64)
    links = np.zeros(n, dtype=np.int64)
    per_vertex[sums["vertex"]] = sums["tri"]
    links[sums["vertex"]] = sums["links"]
    return TriangleCensus(int(per_vertex.sum()) // 3, per_vertex, links)


def density(g: Graph) -> float:
    nv = g.num_vertices()
    if nv < 2:
        raise UndefinedMetricError(f"density needs at least 2 vertices, graph has {nv}")
    return g.num_edges() / (nv * (nv - 1))


def triangle_count(g: Graph) -> int:
    return triangle_census(g).total


def _wedges(degree: np.ndarray) -> int:
    return int((degree * (degree - 1) // 2).sum())


def global_clustering(g: Graph, census: TriangleCensus | None = None,
                      structure: _Structure | None = None) -> float:
    """3 * triangles / connected triples."""
    st = structure or _structure(g)
    wedges = _wedges(st.degree)
    if wedges == 0:
        raise UndefinedMetricError("global clustering needs at least one wedge")
    census = census or triangle_census(g, st)
    return 3 * census.total / wedges


def local_clustering(g: Graph, mode: str = "directed", census: TriangleCensus | None = None,
                     structure: _Structure | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-vertex coefficients as ``(vertex_ids, values)``.

    ``directed`` counts stored ordered edges among the neighbors over
    ``d*(d-1)``; ``undirected`` counts neighbor pairs over ``d*(d-1)/2``.
    Vertices with fewer than two neighbors get 0.
    """
    if mode not in LOCAL_CC_MODES:
        raise ValueError(f"unknown local clustering mode {mode!r}; expected {LOCAL_CC_MODES}")
    st = structure or _structure(g)
    census = census or triangle_census(g, st)
    d = st.degree.astype(np.float64)
    possible = d * (d - 1)
    if mode == "directed":
        links = census.directed_links.astype(np.float64)
    else:
        links = census.per_vertex.astype(np.float64)
        possible = possible / 2
    values = np.zeros(len(d))
    ok = st.degree >= 2
    values[ok] = links[ok] / possible[ok]
    return st.vertex_ids, values


def avg_local_clustering(g: Graph, mode: str = "directed", census: TriangleCensus | None = None,
                         structure: _Structure | None = None) -> float:
    if g.num_vertices() == 0:
        raise UndefinedMetricError("average local clustering of an empty graph")
    _, values = local_clustering(g, mode, census, structure)
    return float(math.fsum(values) / len(values))


def _neighbor_lists(g: Graph, st: _Structure):
    pairs = st.pairs.collect()
    n = len(st.vertex_ids)
    src = np.concatenate([pairs["a"], pairs["b"]])
    dst = np.concatenate([pairs["b"], pairs["a"]])
    ptr, nbr, _ = _csr(src, dst, n)
    nbr_ids = st.vertex_ids[nbr]
    return ptr, nbr_ids


def component_labels(g: Graph, structure: _Structure | None = None) -> dict[int, int]:
    """Weak-component label (minimum member id) per vertex, by min-label
    propagation on the BSP engine."""
    st = structure or _structure(g)
    vids = st.vertex_ids
    ptr, nbr_ids = _neighbor_lists(g, st)

    def neighbors(vid: int) -> list[int]:
        i = int(np.searchsorted(vids, vid))
        return nbr_ids[ptr[i]:ptr[i + 1]].tolist()

    def init(vid):
        # only larger ids can adopt this label in the first round
        return Step(vid, [(u, vid) for u in neighbors(vid) if u > vid])

    def compute(vid, label, inbox, superstep, aggregates):
        best = min(m for _, m in inbox)
        if best < label:
            return Step(best, [(u, best) for u in neighbors(vid) if u != best])
        return Step(label)

    result = run_bsp(g, init, compute)
    return result.states


def wcc_count(g: Graph) -> int:
    labels = component_labels(g)
    return len(set(labels.values()))


def wcc_count_union_find(g: Graph) -> int:
    """Sequential union-find over the stored edges."""
    vids = g.vertex_ids()
    parent = list(range(len(vids)))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    _, src, tgt = g.edge_arrays()
    components = len(vids)
    for s, t in zip(np.searchsorted(vids, src).tolist(), np.searchsorted(vids, tgt).tolist()):
        rs, rt = find(s), find(t)
        if rs != rt:
            parent[max(rs, rt)] = min(rs, rt)
            components -= 1
    return components


def degree_stats(g: Graph) -> tuple[float, int, int]:
    """(average, minimum, maximum) of total directed degree."""
    deg = degree_dataset(g, "total").collect()["degree"]
    if len(deg) == 0:
        raise UndefinedMetricError("degree statistics of an empty graph")
    return float(deg.mean()), int(deg.min()), int(deg.max())


@dataclass
class MetricsReport:
    vertex_count: int | None = None
    edge_count: int | None = None
    density: float | None = None
    triangles: int | None = None
    global_cc: float | None = None
    avg_local_cc: float | None = None
    wcc_count: int | None = None
    d_avg: float | None = None
    d_min: int | None = None
    d_max: int | None = None
    # why a metric is null
    reasons: dict[str, str] = field(default_factory=dict)

    def values(self) -> dict[str, int | float | None]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "reasons"}


def metrics_report(g: Graph, skip_heavy: bool = False, local_cc_mode: str = "directed") -> MetricsReport:
    report = MetricsReport()
    if g.num_vertices() == 0:
        for name in REPORT_FIELDS:
            report.reasons[name] = "empty graph"
        return report

    def attempt(name, fn):
        try:
            setattr(report, name, fn())
        except UndefinedMetricError as exc:
            report.reasons[name] = str(exc)

    report.vertex_count = g.num_vertices()
    report.edge_count = g.num_edges()
    attempt("density", lambda: density(g))
    st = _structure(g)
    if skip_heavy:
        for name in HEAVY_FIELDS:
            report.reasons[name] = "skipped: heavy metrics disabled"
    else:
        census = triangle_census(g, st)
        report.triangles = census.total
        attempt("global_cc", lambda: global_clustering(g, census, st))
        attempt("avg_local_cc", lambda: avg_local_clustering(g, local_cc_mode, census, st))
    report.wcc_count = len(set(component_labels(g, st).values()))
    d_avg, d_min, d_max = degree_stats(g)
    report.d_avg, report.d_min, report.d_max = d_avg, d_min, d_max
    return report


@dataclass
class ComparisonRow:
    metric: str
    a: int | float | None
    b: int | float | None
    ratio: float | None


def compare_reports(a: MetricsReport, b: MetricsReport) -> list[ComparisonRow]:
    """Side-by-side values and the ratio ``b / a`` per metric."""
    rows = []
    for name in REPORT_FIELDS:
        va, vb = getattr(a, name), getattr(b, name)
        ratio = None
        if va is not None and vb is not None and va != 0:
            ratio = vb / va
        rows.append(ComparisonRow(name, va, vb, ratio))
    return rows


def format_value(name: str, value) -> str:
    if value is None:
        return "—"
    if name in INTEGER_FIELDS:
        return str(int(value))
    if name == "d_avg":
        # half-up rounding for display
        return f"{value:.2f} ({math.floor(value + 0.5)})"
    return f"{value:.7f}"


def render_comparison(rows: list[ComparisonRow], labels=("original", "sample")) -> str:
    header = ("metric", labels[0], labels[1], "ratio")
    table = [header] + [
        (
            r.metric,
            format_value(r.metric, r.a),
            format_value(r.metric, r.b),
            "—" if r.ratio is None else f"{r.ratio:.4f}",
        )
        for r in rows
    ]
    widths = [max(len(row[i]) for row in table) for i in range(4)]
    lines = []
    for i, row in enumerate(table):
        lines.append("  ".join(cell.ljust(w) if j == 0 else cell.rjust(w)
                               for j, (cell, w) in enumerate(zip(row, widths))).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
