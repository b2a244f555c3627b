"""Edge-list, DOT and report files, plus a synthetic power-law generator."""

from __future__ import annotations

import io
import json
import math
import re
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataflow import ExecutionContext
from .graph import Graph, degree_dataset
from .metrics import INTEGER_FIELDS, REPORT_FIELDS, MetricsReport, local_clustering


class EdgeListFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ReportParseError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _chunk_bounds(data: bytes, parts: int) -> list[tuple[int, int]]:
    """Byte ranges of roughly equal size, each ending after a newline."""
    size = len(data)
    cuts = [0]
    for i in range(1, parts):
        pos = max(size * i // parts, cuts[-1])
        nl = data.find(b"\n", pos)
        cuts.append(size if nl < 0 else nl + 1)
    cuts.append(size)
    return [(a, b) for a, b in zip(cuts, cuts[1:]) if b > a]


def _locate_error(chunk: bytes, first_line: int, comment: str) -> EdgeListFormatError:
    for offset, raw in enumerate(chunk.split(b"\n")):
        line = raw.decode("utf-8", errors="replace").split(comment, 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        number = first_line + offset
        if len(fields) != 2:
            return EdgeListFormatError(number, f"expected 2 columns, found {len(fields)}: {raw!r}")
        for text in fields:
            if not text.isdigit():
                return EdgeListFormatError(number, f"invalid vertex id {text!r}")
            if int(text) >= 1 << 63:
                return EdgeListFormatError(number, f"vertex id {text} exceeds 64 bits")
    return EdgeListFormatError(first_line, "unparseable chunk")


def _parse_chunk(chunk: bytes, first_line: int, comment: str) -> np.ndarray:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            # numpy would otherwise accept "1.5" as an id via a float round trip
            warnings.simplefilter("error", DeprecationWarning)
            arr = np.loadtxt(io.BytesIO(chunk), dtype=np.int64, comments=comment, ndmin=2)
    except (ValueError, DeprecationWarning):
        raise _locate_error(chunk, first_line, comment) from None
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.shape[1] != 2 or (arr < 0).any():
        raise _locate_error(chunk, first_line, comment)
    return arr


def read_edge_list(path, context: ExecutionContext | None = None, comment: str = "#") -> Graph:
    """Read a SNAP-style whitespace-delimited edge list.

    Edge ids are assigned ``0..m-1`` in file order; vertices are the distinct
    endpoints. Chunks split at line boundaries are parsed concurrently.
    """
    context = context or ExecutionContext()
    data = Path(path).read_bytes()
    bounds = _chunk_bounds(data, context.parallelism)
    first_lines = [data.count(b"\n", 0, a) + 1 for a, _ in bounds]
    parsed = context.run(
        lambda ab, line: _parse_chunk(data[ab[0]:ab[1]], line, comment), bounds, first_lines
    )
    pairs = np.concatenate(parsed) if parsed else np.empty((0, 2), dtype=np.int64)
    return Graph.from_arrays(context, pairs[:, 0], pairs[:, 1])


def write_edge_list(g: Graph, path) -> int:
    """Write edges sorted by (source, target, id), tab-delimited. Returns the
    number of lines written."""
    ids, src, tgt = g.edge_arrays()
    order = np.lexsort((ids, tgt, src))
    src, tgt = src[order].tolist(), tgt[order].tolist()
    with open(path, "w", encoding="ascii") as fh:
        fh.writelines(f"{s}\t{t}\n" for s, t in zip(src, tgt))
    return len(src)


def write_dot(g: Graph, path, local_cc_mode: str = "directed") -> None:
    """DOT digraph whose nodes carry ``degree`` and ``local_cc`` attributes."""
    deg = degree_dataset(g, "total").collect()
    order = np.argsort(deg["id"])
    vids, degrees = deg["id"][order].tolist(), deg["degree"][order].tolist()
    if vids:
        cc_ids, cc = local_clustering(g, local_cc_mode)
        cc_by_id = dict(zip(cc_ids.tolist(), cc.tolist()))
    ids, src, tgt = g.edge_arrays()
    with open(path, "w", encoding="ascii") as fh:
        fh.write("digraph sample {\n")
        for vid, d in zip(vids, degrees):
            fh.write(f'  {vid} [degree={d}, local_cc={cc_by_id[vid]:.6f}];\n')
        for eid, s, t in zip(ids.tolist(), src.tolist(), tgt.tolist()):
            fh.write(f"  {s} -> {t} [id={eid}];\n")
        fh.write("}\n")


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    m: int
    gamma: float = 2.5
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if self.n == 1 and self.m > 0:
            raise ValueError("a single vertex cannot carry edges without self-loops")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> SyntheticSpec:
        """Parse ``n=<int>,m=<int>[,gamma=<float>]``."""
        values = {}
        for item in text.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in ("n", "m", "gamma"):
                raise ValueError(f"bad generator parameter {item!r}; expected n=,m=[,gamma=]")
            values[key] = float(value) if key == "gamma" else int(float(value))
        if "n" not in values or "m" not in values:
            raise ValueError("generator needs both n= and m=")
        return cls(seed=seed, **values)


def generate_synthetic(spec: SyntheticSpec, context: ExecutionContext | None = None) -> Graph:
    """Directed multigraph whose endpoints follow power-law vertex weights.

    Vertex of weight rank ``i`` gets weight ``(i + 1) ** (-1 / (gamma - 1))``,
    which yields a degree tail with exponent ``gamma``. Self-loops are redrawn.
    """
    context = context or ExecutionContext()
    rng = np.random.default_rng(spec.seed)
    weights = np.arange(1, spec.n + 1, dtype=np.float64) ** (-1.0 / (spec.gamma - 1.0))
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]

    def draw(k):
        return np.minimum(np.searchsorted(cdf, rng.random(k), side="right"), spec.n - 1)

    src = draw(spec.m)
    tgt = draw(spec.m)
    loops = np.flatnonzero(src == tgt)
    while len(loops):
        src[loops] = draw(len(loops))
        tgt[loops] = draw(len(loops))
        loops = loops[src[loops] == tgt[loops]]
    labels = rng.permutation(spec.n)
    return Graph.from_arrays(
        context, labels[src], labels[tgt], vertex_ids=np.arange(spec.n, dtype=np.int64)
    )


def _format_number(name: str, value) -> str:
    if name in INTEGER_FIELDS:
        return str(int(value))
    return repr(float(value))


def _parse_number(name: str, text: str):
    try:
        if name in INTEGER_FIELDS:
            return int(text)
        value = float(text)
    except ValueError:
        raise ReportParseError(name, f"invalid value {text!r}") from None
    if math.isnan(value):
        raise ReportParseError(name, "NaN is not a valid metric value")
    return value


def write_report(report: MetricsReport, path) -> None:
    """``.json`` paths get a JSON document, anything else ``metric = value`` lines."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = dict(report.values())
        doc["reasons"] = dict(report.reasons)
        path.write_text(json.dumps(doc, indent=2) + "\n")
        return
    lines = []
    for name in REPORT_FIELDS:
        value = getattr(report, name)
        if value is None:
            reason = report.reasons.get(name, "")
            lines.append(f"{name} = null" + (f"  # {reason}" if reason else ""))
        else:
            lines.append(f"{name} = {_format_number(name, value)}")
    path.write_text("\n".join(lines) + "\n")


_LINE = re.compile(r"^\s*([A-Za-z_]\w*)\s*=\s*(\S+)\s*(?:#\s?(.*))?$")


def read_report(path) -> MetricsReport:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ReportParseError("document", str(exc)) from None
        raw = {k: doc[k] for k in REPORT_FIELDS if k in doc}
        reasons = dict(doc.get("reasons") or {})
    else:
        raw, reasons = {}, {}
        for number, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            match = _LINE.match(line)
            if not match:
                raise ReportParseError(f"line {number}", f"expected 'metric = value': {line!r}")
            name, value, reason = match.groups()
            raw[name] = None if value == "null" else value
            if value == "null" and reason:
                reasons[name] = reason.strip()
    report = MetricsReport(reasons=reasons)
    for name in REPORT_FIELDS:
        if name not in raw:
            raise ReportParseError(name, "missing field")
        value = raw[name]
        if value is not None:
            value = _parse_number(name, str(value))
        setattr(report, name, value)
    return report
