"""A small partitioned, in-memory dataflow engine.

Datasets are lists of columnar partitions (:class:`Batch`). Transformations
run one task per partition on a thread pool and join all tasks before
returning, so every call is a stage barrier. User functions receive whole
partitions and must be vectorized and side-effect free::

    ctx = ExecutionContext(parallelism=4, seed=7)
    d = PartitionedDataset.from_columns(ctx, {"key": keys, "value": values}, key="key")
    sums = d.reduce_by_key("key", np.add)
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np


class Batch:
    """An immutable set of equal-length named numpy columns."""

    __slots__ = ("_columns", "_length")

    def __init__(self, columns: Mapping[str, np.ndarray]):
        cols = {}
        length = None
        for name, values in columns.items():
            arr = np.asarray(values).view()
            if arr.ndim != 1:
                raise ValueError(f"column {name!r} must be one-dimensional")
            if length is None:
                length = len(arr)
            elif len(arr) != length:
                raise ValueError(
                    f"column {name!r} has length {len(arr)}, expected {length}"
                )
            arr.flags.writeable = False
            cols[name] = arr
        self._columns = cols
        self._length = length or 0

    def __len__(self) -> int:
        return self._length

    def __getitem__(self, name: str) -> np.ndarray:
        return self._columns[name]

    def __contains__(self, name: str) -> bool:
        return name in self._columns

    def __repr__(self) -> str:
        return f"Batch(rows={self._length}, columns={list(self._columns)})"

    @property
    def columns(self) -> list[str]:
        return list(self._columns)

    def items(self):
        return self._columns.items()

    def take(self, index) -> Batch:
        """Rows selected by a boolean mask or an integer index array."""
        return Batch({k: v[index] for k, v in self._columns.items()})

    def select(self, *names: str) -> Batch:
        return Batch({k: self._columns[k] for k in names})

    def with_columns(self, **columns) -> Batch:
        merged = dict(self._columns)
        merged.update(columns)
        return Batch(merged)

    def rename(self, **mapping: str) -> Batch:
        return Batch({mapping.get(k, k): v for k, v in self._columns.items()})

    def empty_like(self) -> Batch:
        return Batch({k: v[:0] for k, v in self._columns.items()})

    def to_rows(self) -> list[tuple]:
        cols = [v.tolist() for v in self._columns.values()]
        return list(zip(*cols))

    @staticmethod
    def concat(batches: Sequence[Batch]) -> Batch:
        if not batches:
            return Batch({})
        names = batches[0].columns
        for b in batches[1:]:
            if b.columns != names:
                raise ValueError(f"schema mismatch: {b.columns} vs {names}")
        if len(batches) == 1:
            return batches[0]
        return Batch({k: np.concatenate([b[k] for b in batches]) for k in names})


@dataclass
class ExecutionContext:
    """Worker pool and master seed shared by every dataset derived from it."""

    parallelism: int = 1
    seed: int = 0
    _pool: ThreadPoolExecutor | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if int(self.parallelism) < 1:
            raise ValueError(f"parallelism must be >= 1, got {self.parallelism}")
        self.parallelism = int(self.parallelism)
        self.seed = int(self.seed) & ((1 << 64) - 1)

    def run(self, fn: Callable, *args: Sequence) -> list:
        """Apply ``fn`` to zipped task arguments concurrently; barrier on return."""
        tasks = list(zip(*args))
        if self.parallelism == 1 or len(tasks) <= 1:
            return [fn(*a) for a in tasks]
        if self._pool is None:
            self._pool = ThreadPoolExecutor(
                max_workers=self.parallelism, thread_name_prefix="dataflow"
            )
        futures = [self._pool.submit(fn, *a) for a in tasks]
        return [f.result() for f in futures]

    def close(self):
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _split_by_destination(batch: Batch, dest: np.ndarray, n: int) -> list[Batch]:
    order = np.argsort(dest, kind="stable")
    bounds = np.cumsum(np.bincount(dest, minlength=n))
    sorted_batch = batch.take(order)
    pieces = []
    start = 0
    for stop in bounds:
        pieces.append(sorted_batch.take(slice(start, int(stop))))
        start = int(stop)
    return pieces


def _join_partition(left: Batch, right: Batch, left_key, right_key, f) -> Batch:
    lkeys = left[left_key]
    rkeys = right[right_key]
    order = np.argsort(rkeys, kind="stable")
    rsorted = rkeys[order]
    # probing in key order keeps the binary searches cache friendly
    lorder = np.argsort(lkeys, kind="stable")
    lsorted = lkeys[lorder]
    lo = np.empty(len(lkeys), dtype=np.intp)
    hi = np.empty(len(lkeys), dtype=np.intp)
    lo[lorder] = np.searchsorted(rsorted, lsorted, side="left")
    hi[lorder] = np.searchsorted(rsorted, lsorted, side="right")
    counts = hi - lo
    total = int(counts.sum())
    left_idx = np.repeat(np.arange(len(lkeys)), counts)
    run_start = np.repeat(np.cumsum(counts) - counts, counts)
    right_idx = order[np.repeat(lo, counts) + (np.arange(total) - run_start)]
    return f(left.take(left_idx), right.take(right_idx))


def _reduce_partition(batch: Batch, key: str, combine: np.ufunc) -> Batch:
    if len(batch) == 0:
        return batch
    order = np.argsort(batch[key], kind="stable")
    keys = batch[key][order]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    out = {key: keys[starts]}
    for name, values in batch.items():
        if name != key:
            out[name] = combine.reduceat(values[order], starts)
    return Batch(out)


class PartitionedDataset:
    """A typed collection split into ``num_partitions`` columnar partitions.

    ``partitioned_by`` records the key column whose ``key % P`` placement the
    partitions currently honour, so joins and reductions can skip a shuffle.
    """

    def __init__(
        self,
        context: ExecutionContext,
        partitions: Sequence[Batch],
        partitioned_by: str | None = None,
    ):
        if not partitions:
            raise ValueError("a dataset needs at least one partition")
        self.context = context
        self.partitions = tuple(partitions)
        self.partitioned_by = partitioned_by

    @classmethod
    def from_columns(
        cls,
        context: ExecutionContext,
        columns: Mapping[str, np.ndarray],
        key: str | None = None,
        num_partitions: int | None = None,
    ) -> PartitionedDataset:
        """Distribute columns by ``key % P``, or round-robin when unkeyed."""
        p = num_partitions or context.parallelism
        if p < 1:
            raise ValueError(f"number of partitions must be >= 1, got {p}")
        batch = Batch(columns)
        if key is None:
            dest = np.arange(len(batch), dtype=np.int64) % p
        else:
            dest = batch[key] % p
        return cls(context, _split_by_destination(batch, dest, p), key)

    @property
    def num_partitions(self) -> int:
        return len(self.partitions)

    @property
    def columns(self) -> list[str]:
        return self.partitions[0].columns

    def __repr__(self) -> str:
        return (
            f"PartitionedDataset(partitions={self.num_partitions}, "
            f"columns={self.columns}, rows={self.count()})"
        )

    def _derive(self, partitions, partitioned_by=None) -> PartitionedDataset:
        return PartitionedDataset(self.context, partitions, partitioned_by)

    def collect(self) -> Batch:
        return Batch.concat(self.partitions)

    def count(self) -> int:
        return sum(len(p) for p in self.partitions)

    def map_partitions(self, fn: Callable[[Batch], Batch]) -> PartitionedDataset:
        """Run ``fn`` on every partition; output placement is not tracked."""
        return self._derive(self.context.run(fn, self.partitions))

    def filter(self, predicate: Callable[[Batch], np.ndarray]) -> PartitionedDataset:
        """Keep rows where the vectorized predicate is true."""

        def task(batch: Batch) -> Batch:
            mask = np.asarray(predicate(batch), dtype=bool)
            if mask.shape != (len(batch),):
                raise ValueError("predicate must return one boolean per row")
            return batch.take(mask)

        return self._derive(self.context.run(task, self.partitions), self.partitioned_by)

    def map(self, f: Callable[[Batch], Batch | Mapping]) -> PartitionedDataset:
        """One output row per input row.

        Placement by ``partitioned_by`` is kept when ``f`` leaves that column
        untouched.
        """

        def task(batch: Batch) -> Batch:
            out = f(batch)
            if not isinstance(out, Batch):
                out = Batch(out)
            if len(out) != len(batch):
                raise ValueError(
                    f"map must be one-to-one: {len(batch)} rows in, {len(out)} out"
                )
            return out

        outputs = self.context.run(task, self.partitions)
        keep = self.partitioned_by
        if keep is not None and not all(
            keep in o and np.array_equal(o[keep], p[keep])
            for o, p in zip(outputs, self.partitions)
        ):
            keep = None
        return self._derive(outputs, keep)

    def repartition_by_key(self, key: str, num_partitions: int | None = None) -> PartitionedDataset:
        p = self.num_partitions if num_partitions is None else num_partitions
        if p < 1:
            raise ValueError(f"number of partitions must be >= 1, got {p}")
        if self.partitioned_by == key and self.num_partitions == p:
            return self
        pieces = self.context.run(
            lambda b: _split_by_destination(b, b[key] % p, p), self.partitions
        )
        outputs = self.context.run(
            lambda i: Batch.concat([row[i] for row in pieces]), range(p)
        )
        return self._derive(outputs, key)

    def reduce_by_key(self, key: str, combine: np.ufunc) -> PartitionedDataset:
        """Fold all non-key columns per distinct key with a numpy ufunc.

        ``combine`` must be associative and commutative (``np.add``,
        ``np.minimum``, ``np.maximum``, ...).
        """
        local = self.context.run(
            lambda b: _reduce_partition(b, key, combine), self.partitions
        )
        shuffled = self._derive(local).repartition_by_key(key, self.num_partitions)
        merged = self.context.run(
            lambda b: _reduce_partition(b, key, combine), shuffled.partitions
        )
        return self._derive(merged, key)

    def distinct(self, key: str) -> PartitionedDataset:
        """Distinct values of a single column."""
        only = self.map(lambda b: b.select(key))
        return only.reduce_by_key(key, np.minimum)

    def join(
        self,
        other: PartitionedDataset,
        f: Callable[[Batch, Batch], Batch],
        left_key: str = "key",
        right_key: str | None = None,
    ) -> PartitionedDataset:
        """Inner equi-join; ``f`` combines row-aligned matching batches."""
        right_key = right_key or left_key
        p = self.num_partitions
        left = self.repartition_by_key(left_key, p)
        right = other.repartition_by_key(right_key, p)
        outputs = self.context.run(
            lambda lb, rb: _join_partition(lb, rb, left_key, right_key, f),
            left.partitions,
            right.partitions,
        )
        return self._derive(outputs)

    def union(self, other: PartitionedDataset) -> PartitionedDataset:
        if other.columns != self.columns:
            raise ValueError(f"schema mismatch: {other.columns} vs {self.columns}")
        if other.num_partitions != self.num_partitions:
            other = other.repartition_by_key(other.columns[0], self.num_partitions)
        outputs = self.context.run(
            lambda a, b: Batch.concat([a, b]), self.partitions, other.partitions
        )
        return self._derive(outputs)


def sorted_rows(d: PartitionedDataset | Batch) -> list[tuple]:
    """Rows in canonical order, for multiset comparisons."""
    batch = d.collect() if isinstance(d, PartitionedDataset) else d
    return sorted(batch.to_rows())


def from_rows(
    context: ExecutionContext,
    names: Iterable[str],
    rows: Iterable[tuple],
    key: str | None = None,
    num_partitions: int | None = None,
) -> PartitionedDataset:
    names = list(names)
    rows = list(rows)
    cols = {
        n: np.array([r[i] for r in rows], dtype=np.int64) if rows else np.empty(0, np.int64)
        for i, n in enumerate(names)
    }
    return PartitionedDataset.from_columns(context, cols, key=key, num_partitions=num_partitions)
