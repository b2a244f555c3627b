import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphsampling.dataflow import Batch, ExecutionContext, PartitionedDataset, from_rows, sorted_rows


def values(ctx, xs):
    return PartitionedDataset.from_columns(ctx, {"value": np.array(xs, dtype=np.int64)})


def keyed(ctx, rows):
    return from_rows(ctx, ("key", "value"), rows)


def flat(d):
    return sorted(d.collect()["value"].tolist())


class TestFilter:
    def test_keep_even(self, ctx):
        assert flat(values(ctx, [1, 2, 3, 4]).filter(lambda b: b["value"] % 2 == 0)) == [2, 4]

    def test_empty(self, ctx):
        assert flat(values(ctx, []).filter(lambda b: b["value"] > 0)) == []

    def test_identity(self, ctx):
        assert flat(values(ctx, [5]).filter(lambda b: np.ones(len(b), bool))) == [5]

    def test_output_is_subset(self, ctx):
        d = values(ctx, range(100))
        out = d.filter(lambda b: b["value"] % 3 == 1)
        assert set(flat(out)) <= set(flat(d))

    def test_rejects_wrong_mask_length(self, ctx1):
        with pytest.raises(ValueError):
            values(ctx1, [1, 2]).filter(lambda b: np.array([True]))


class TestMap:
    def test_increment(self, ctx):
        out = values(ctx, [1, 2, 3]).map(lambda b: {"value": b["value"] + 1})
        assert flat(out) == [2, 3, 4]

    def test_empty(self, ctx):
        assert values(ctx, []).map(lambda b: {"value": b["value"] * 2}).count() == 0

    def test_set_flag(self, ctx):
        d = PartitionedDataset.from_columns(
            ctx, {"id": np.array([7]), "flag": np.array([False])}, key="id"
        )
        out = d.map(lambda b: b.with_columns(flag=np.ones(len(b), bool)))
        assert sorted_rows(out) == [(7, True)]

    def test_one_to_one_enforced(self, ctx1):
        with pytest.raises(ValueError, match="one-to-one"):
            values(ctx1, [1, 2]).map(lambda b: {"value": b["value"][:1]})


class TestReduceByKey:
    def test_sum(self, ctx):
        out = keyed(ctx, [(1, 2), (1, 3), (2, 5)]).reduce_by_key("key", np.add)
        assert sorted_rows(out) == [(1, 5), (2, 5)]

    def test_singleton(self, ctx):
        assert sorted_rows(keyed(ctx, [(7, 1)]).reduce_by_key("key", np.add)) == [(7, 1)]

    def test_empty(self, ctx):
        assert keyed(ctx, []).reduce_by_key("key", np.add).count() == 0

    def test_matches_sequential_fold_on_shuffled_input(self, ctx):
        rng = np.random.default_rng(4)
        rows = [(int(k), int(v)) for k, v in zip(rng.integers(0, 50, 2000), rng.integers(-9, 9, 2000))]
        expected = {}
        for k, v in rows:
            expected[k] = expected.get(k, 0) + v
        out = keyed(ctx, [rows[i] for i in rng.permutation(len(rows))]).reduce_by_key("key", np.add)
        assert sorted_rows(out) == sorted(expected.items())


class TestJoin:
    @staticmethod
    def pair(l, r):
        return Batch({"key": l["key"], "left": l["value"], "right": r["value"]})

    def test_fan_out(self, ctx):
        out = keyed(ctx, [(1, 10)]).join(keyed(ctx, [(1, 20), (1, 21)]), self.pair)
        assert sorted_rows(out) == [(1, 10, 20), (1, 10, 21)]

    def test_no_overlap(self, ctx):
        assert keyed(ctx, [(1, 10)]).join(keyed(ctx, [(2, 20)]), self.pair).count() == 0

    def test_empty_left(self, ctx):
        assert keyed(ctx, []).join(keyed(ctx, [(1, 20)]), self.pair).count() == 0

    def test_cardinality_matches_brute_force(self, ctx):
        rng = np.random.default_rng(8)
        left = [(int(k), i) for i, k in enumerate(rng.integers(0, 12, 60))]
        right = [(int(k), i) for i, k in enumerate(rng.integers(0, 12, 40))]
        expected = sorted((lk, lv, rv) for lk, lv in left for rk, rv in right if lk == rk)
        out = keyed(ctx, left).join(keyed(ctx, right), self.pair)
        assert sorted_rows(out) == expected

    def test_different_key_names(self, ctx):
        left = from_rows(ctx, ("src", "eid"), [(1, 100), (2, 101)])
        right = from_rows(ctx, ("id", "flag"), [(2, 1)])
        out = left.join(right, lambda l, r: l, left_key="src", right_key="id")
        assert sorted_rows(out) == [(2, 101)]


class TestCountAndRepartition:
    def test_count(self, ctx):
        assert values(ctx, []).count() == 0
        assert values(ctx, [4, 5, 6]).count() == 3

    def test_colocates_keys(self, ctx):
        d = keyed(ctx, [(1, 0), (1, 1), (2, 2)]).repartition_by_key("key", 2)
        homes = [i for i, p in enumerate(d.partitions) if 1 in p["key"].tolist()]
        assert len(homes) == 1
        assert d.num_partitions == 2

    def test_single_partition(self, ctx):
        d = keyed(ctx, [(i, i) for i in range(10)]).repartition_by_key("key", 1)
        assert d.num_partitions == 1 and len(d.partitions[0]) == 10

    def test_preserves_count(self, ctx):
        rng = np.random.default_rng(1)
        d = keyed(ctx, [(int(k), 0) for k in rng.integers(0, 1 << 40, 1000)])
        assert d.repartition_by_key("key", 8).count() == 1000

    def test_rejects_zero_partitions(self, ctx1):
        with pytest.raises(ValueError):
            keyed(ctx1, [(1, 1)]).repartition_by_key("key", 0)


def test_parallelism_must_be_positive():
    with pytest.raises(ValueError):
        ExecutionContext(parallelism=0)


rows_strategy = st.lists(
    st.tuples(st.integers(0, 40), st.integers(-100, 100)), max_size=80
)


@settings(max_examples=60, deadline=None)
@given(rows=rows_strategy)
def test_repartition_invariance(rows):
    outputs = []
    for p in (1, 2, 4, 8):
        with ExecutionContext(p) as ctx:
            d = keyed(ctx, rows)
            outputs.append((
                sorted_rows(d.filter(lambda b: b["value"] > 0)),
                sorted_rows(d.map(lambda b: b.with_columns(value=b["value"] * 3))),
                sorted_rows(d.reduce_by_key("key", np.add)),
                sorted_rows(d.join(d, lambda l, r: Batch({"a": l["value"], "b": r["value"]}))),
                d.count(),
            ))
    assert all(o == outputs[0] for o in outputs)


@settings(max_examples=60, deadline=None)
@given(rows=rows_strategy, a=st.integers(-50, 50), m=st.integers(2, 5))
def test_filter_fusion(rows, a, m):
    with ExecutionContext(3) as ctx:
        d = keyed(ctx, rows)
        p = lambda b: b["value"] > a  # noqa: E731
        q = lambda b: b["key"] % m == 0  # noqa: E731
        assert sorted_rows(d.filter(p).filter(q)) == sorted_rows(d.filter(lambda b: p(b) & q(b)))
