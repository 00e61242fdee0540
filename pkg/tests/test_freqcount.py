import numpy as np
import pytest
from hypothesis import given, strategies as st

from dptree import BinaryDataset, InputError, Literal, split
from dptree.dataset import dataset_diff
from dptree.freqcount import (CounterStore, build_counts, choose_counter_and_refresh, derived_count,
                              refresh_with_sibling, update_counts_incremental)
from dptree.testing import random_dataset

from conftest import small_datasets


def reference_counts(d):
    X, y = d.table.features, d.table.labels
    C, F = d.n_classes, d.n_features
    out = np.zeros((C, F, F), np.int64)
    for i in d.ids:
        for a in range(F):
            for b in range(a, F):
                out[y[i], a, b] += X[i, a] & X[i, b]
    return out


def upper(counts):
    F = counts.shape[1]
    return counts[:, np.triu(np.ones((F, F), bool))]


def test_direct_count_example():
    X = np.array([[1, 1], [1, 0], [0, 0]])
    fq = build_counts(BinaryDataset.from_arrays(X, np.array([1, 1, 0])))
    assert fq.single(1, 0) == 2 and fq.single(1, 1) == 1 and fq.pair(1, 0, 1) == 1
    assert fq.pair(1, 1, 0) == 1


def test_empty_dataset_counts_zero():
    fq = build_counts(random_dataset(0).empty())
    assert not fq.counts.any() and not fq.class_totals.any()


def test_matches_nested_loop_reference():
    d = random_dataset(3, n_instances=64, n_features=8)
    assert np.array_equal(upper(build_counts(d).counts), upper(reference_counts(d)))


def test_derived_count_arithmetic():
    # one class of 25 instances: f0 in 10, f1 in 8, both in 4
    X = np.zeros((25, 2), np.uint8)
    X[:4] = 1
    X[4:10, 0] = 1
    X[10:14, 1] = 1
    fq = build_counts(BinaryDataset.from_arrays(X, np.zeros(25, np.int64)))
    assert derived_count(fq, 0, Literal(0, False), Literal(1, False)) == 11
    assert derived_count(fq, 0, Literal(0, False)) == 15
    with pytest.raises(InputError):
        derived_count(fq, 0, Literal(0), Literal(0))
    with pytest.raises(InputError):
        derived_count(fq, 0, Literal(7))


@given(small_datasets(max_features=8), st.integers(0, 7), st.integers(0, 7))
def test_derived_counts_match_explicit_splits(d, i, j):
    i %= d.n_features
    j %= d.n_features
    if i == j:
        return
    fq = build_counts(d)
    for c in range(d.n_classes):
        total = 0
        for pi in (False, True):
            for pj in (False, True):
                sub = split(split(d, Literal(i, pi)), Literal(j, pj))
                got = derived_count(fq, c, Literal(i, pi), Literal(j, pj))
                assert got == sub.class_sizes[c]
                total += got
        assert total == d.class_sizes[c]


def test_incremental_trivial_cases():
    d = random_dataset(1)
    fq = build_counts(d)
    same = update_counts_incremental(fq, d.empty(), d.empty())
    assert same.same_counts(fq)
    grown = update_counts_incremental(build_counts(d.empty()), d, d.empty())
    assert grown.same_counts(fq)


@given(st.integers(0, 2**31), st.integers(0, 2**31), st.integers(0, 2**31))
def test_incremental_equals_scratch(seed, s1, s2):
    root = random_dataset(seed, n_instances=64, n_features=8, n_classes=3)
    rng1, rng2 = np.random.default_rng(s1), np.random.default_rng(s2)
    old = root.subset(rng1.choice(64, int(rng1.integers(0, 65)), replace=False))
    new = root.subset(rng2.choice(64, int(rng2.integers(0, 65)), replace=False))
    d_in, d_out = dataset_diff(new, old)
    inc = update_counts_incremental(build_counts(old), d_in, d_out)
    assert inc.same_counts(build_counts(new))


def test_store_empty_builds_in_slot_zero():
    d = random_dataset(2)
    store = CounterStore(d.n_classes, d.n_features)
    choose_counter_and_refresh(store, d)
    assert store.scratch_builds == 1 and store.slots[0][0] is d and store.slots[1] is None


def test_store_reuses_identical_slot():
    root = random_dataset(2, n_instances=40)
    a, b = root.subset(range(20)), root.subset(range(20, 40))
    store = CounterStore(root.n_classes, root.n_features)
    choose_counter_and_refresh(store, a)
    choose_counter_and_refresh(store, b)
    slot_b = [s for s in (0, 1) if store.slots[s][0] is b][0]
    before = store.slots[slot_b][1].counts.copy()
    fq = choose_counter_and_refresh(store, root.subset(range(20, 40)))
    assert fq is store.slots[slot_b][1]
    assert np.array_equal(fq.counts, before)
    assert store.incremental_builds == 1


def test_store_picks_nearest_slot():
    root = random_dataset(5, n_instances=100, n_features=6)
    d_new = root.subset(range(50))
    near = root.subset(range(47))        # distance 3
    far = root.subset(range(20, 70))     # distance 20 + 20
    store = CounterStore(root.n_classes, root.n_features)
    store.slots = [(far, build_counts(far)), (near, build_counts(near))]
    fq = choose_counter_and_refresh(store, d_new)
    assert store.slots[1][0] is d_new and store.slots[0][0] is far
    assert store.incremental_builds == 1
    assert fq.same_counts(build_counts(d_new))


@given(st.integers(0, 2**31), st.integers(0, 7))
def test_sibling_route_equals_scratch(seed, f):
    root = random_dataset(seed, n_instances=60, n_features=8, n_classes=3)
    store = CounterStore(root.n_classes, root.n_features)
    rng = np.random.default_rng(seed)
    parent = root.subset(rng.choice(60, 40, replace=False))
    absent, present = split(parent, Literal(f, False)), split(parent, Literal(f, True))
    choose_counter_and_refresh(store, present.subset(list(present.ids)[:-1]) if present.size else present)
    for target, sibling in ((absent, present), (present, absent)):
        fq = refresh_with_sibling(store, target, parent, sibling)
        assert fq.same_counts(build_counts(target))


def test_sibling_route_is_taken_when_cheaper():
    root = random_dataset(9, n_instances=200, n_features=6)
    parent = root.subset(range(150))
    absent, present = split(parent, Literal(0, False)), split(parent, Literal(0, True))
    big, small = (absent, present) if absent.size > present.size else (present, absent)
    store = CounterStore(root.n_classes, root.n_features)
    choose_counter_and_refresh(store, small)
    fq = refresh_with_sibling(store, big, parent, small)
    assert store.derived_builds == 1
    assert fq.same_counts(build_counts(big))
