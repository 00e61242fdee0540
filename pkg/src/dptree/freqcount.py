"""Per-class single and pairwise feature frequency counters.

Counts live in one ``(C, F, F)`` array: ``counts[c, i, i]`` is the number of
class-``c`` instances containing feature ``i`` and ``counts[c, i, j]`` for
``i < j`` the number containing both.  The lower triangle is unused.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .dataset import BinaryDataset, Literal, diff_sizes
from .errors import InputError, InternalError


@njit(cache=True)
def _add_instances(counts, totals, indptr, indices, ids, offsets, sign):
    ok = True
    for c in range(offsets.shape[0] - 1):
        totals[c] += sign * (offsets[c + 1] - offsets[c])
        if totals[c] < 0:
            ok = False
        for k in range(offsets[c], offsets[c + 1]):
            i = ids[k]
            start = indptr[i]
            end = indptr[i + 1]
            for a in range(start, end):
                fa = indices[a]
                for b in range(a, end):
                    v = counts[c, fa, indices[b]] + sign
                    counts[c, fa, indices[b]] = v
                    if v < 0:
                        ok = False
    return ok


@njit(cache=True)
def _add_pairs(counts, c, indptr, indices, i, sign):
    start = indptr[i]
    end = indptr[i + 1]
    ok = True
    for a in range(start, end):
        fa = indices[a]
        for b in range(a, end):
            v = counts[c, fa, indices[b]] + sign
            counts[c, fa, indices[b]] = v
            if v < 0:
                ok = False
    return ok


@njit(cache=True)
def _update_towards(counts, totals, indptr, indices, new_ids, new_off, old_ids, old_off):
    """Turn counts of the old id set into counts of the new one in a single merge."""
    ok = True
    for c in range(new_off.shape[0] - 1):
        a = new_off[c]
        a_end = new_off[c + 1]
        b = old_off[c]
        b_end = old_off[c + 1]
        totals[c] += (a_end - a) - (b_end - b)
        while a < a_end and b < b_end:
            x = new_ids[a]
            y = old_ids[b]
            if x == y:
                a += 1
                b += 1
            elif x < y:
                _add_pairs(counts, c, indptr, indices, x, 1)
                a += 1
            else:
                ok &= _add_pairs(counts, c, indptr, indices, y, -1)
                b += 1
        while a < a_end:
            _add_pairs(counts, c, indptr, indices, new_ids[a], 1)
            a += 1
        while b < b_end:
            ok &= _add_pairs(counts, c, indptr, indices, old_ids[b], -1)
            b += 1
        if totals[c] < 0:
            ok = False
    return ok


class PairFrequencyCounter:
    __slots__ = ("counts", "class_totals", "fingerprint")

    def __init__(self, n_classes: int, n_features: int):
        self.counts = np.zeros((n_classes, n_features, n_features), dtype=np.int64)
        self.class_totals = np.zeros(n_classes, dtype=np.int64)
        self.fingerprint = (0, 0)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def n_features(self) -> int:
        return self.counts.shape[1]

    def single(self, c: int, i: int) -> int:
        return int(self.counts[c, i, i])

    def pair(self, c: int, i: int, j: int) -> int:
        if i == j:
            return int(self.counts[c, i, i])
        if i > j:
            i, j = j, i
        return int(self.counts[c, i, j])

    def copy(self) -> "PairFrequencyCounter":
        out = PairFrequencyCounter.__new__(PairFrequencyCounter)
        out.counts = self.counts.copy()
        out.class_totals = self.class_totals.copy()
        out.fingerprint = self.fingerprint
        return out

    def same_counts(self, other: "PairFrequencyCounter") -> bool:
        """Field-by-field equality of totals, singles and the upper-triangle pairs."""
        if self.counts.shape != other.counts.shape:
            return False
        upper = np.triu(np.ones(self.counts.shape[1:], dtype=bool))
        return (np.array_equal(self.class_totals, other.class_totals)
                and np.array_equal(self.counts[:, upper], other.counts[:, upper]))


def _fingerprint(d: BinaryDataset) -> tuple[int, int]:
    return d.hash(), d.size


def build_counts(d: BinaryDataset) -> PairFrequencyCounter:
    t = d.table
    fq = PairFrequencyCounter(t.n_classes, t.n_features)
    _add_instances(fq.counts, fq.class_totals, t.indptr, t.indices, d.ids, d.offsets, 1)
    fq.fingerprint = _fingerprint(d)
    return fq


def update_counts_incremental(fq: PairFrequencyCounter, d_in: BinaryDataset,
                              d_out: BinaryDataset) -> PairFrequencyCounter:
    """Counter of ``old + d_in - d_out`` where ``fq`` counted ``old``; ``fq`` is left untouched."""
    t = d_in.table
    out = fq.copy()
    _add_instances(out.counts, out.class_totals, t.indptr, t.indices, d_in.ids, d_in.offsets, 1)
    ok = _add_instances(out.counts, out.class_totals, t.indptr, t.indices, d_out.ids, d_out.offsets, -1)
    if not ok:
        raise InternalError("frequency count decremented below zero; d_out is not a subset of the counted data")
    out.fingerprint = None
    return out


def _lit_count(fq: PairFrequencyCounter, c: int, lit: Literal) -> int:
    n = int(fq.counts[c, lit.feature, lit.feature])
    return n if lit.present else int(fq.class_totals[c]) - n


def derived_count(fq: PairFrequencyCounter, c: int, lit_a: Literal, lit_b: Literal | None = None) -> int:
    """Class-``c`` count of instances matching one or two literals of any polarity."""
    for lit in (lit_a, lit_b):
        if lit is not None and not 0 <= lit.feature < fq.n_features:
            raise InputError(f"feature index {lit.feature} out of range")
    if lit_b is None:
        return _lit_count(fq, c, lit_a)
    i, j = lit_a.feature, lit_b.feature
    if i == j:
        raise InputError("derived_count needs two distinct features")
    both = fq.pair(c, i, j)
    fi = int(fq.counts[c, i, i])
    fj = int(fq.counts[c, j, j])
    if lit_a.present and lit_b.present:
        return both
    if lit_a.present:
        return fi - both
    if lit_b.present:
        return fj - both
    return int(fq.class_totals[c]) - fi - fj + both


class CounterStore:
    """Two (dataset, counter) slots; each request refreshes the cheaper one.

    The slot whose dataset is nearest to the request (``|d_in| + |d_out|``) is
    updated incrementally when that distance is below ``|d_new|``; otherwise
    it is rebuilt from scratch.  An empty slot is treated as an empty dataset.

    A third counter may hold a parent dataset so that one child of a split can
    be derived as ``parent - sibling`` (see :func:`refresh_with_sibling`).
    """

    def __init__(self, n_classes: int, n_features: int, incremental: bool = True):
        self.n_classes = n_classes
        self.n_features = n_features
        self.incremental = incremental
        self.slots: list[tuple[BinaryDataset, PairFrequencyCounter] | None] = [None, None]
        self.parent: tuple[BinaryDataset, PairFrequencyCounter] | None = None
        self.scratch_builds = 0
        self.incremental_builds = 0
        self.derived_builds = 0
        self.parent_builds = 0

    def refresh(self, d_new: BinaryDataset) -> PairFrequencyCounter:
        return choose_counter_and_refresh(self, d_new)


def _check_shape(store: CounterStore, d: BinaryDataset) -> None:
    t = d.table
    if (t.n_classes, t.n_features) != (store.n_classes, store.n_features):
        store.n_classes, store.n_features = t.n_classes, t.n_features
        store.slots = [None, None]
        store.parent = None


def _nearest_slot(store: CounterStore, d_new: BinaryDataset) -> tuple[int, int]:
    """(slot, |d_in| + |d_out|) of the cheapest starting point; empty slots cost ``|d_new|``."""
    t = d_new.table
    best_slot, best_dist = 0, None
    for s, item in enumerate(store.slots):
        if item is None:
            dist = d_new.size
        elif item[0].table is not t:
            store.slots[s] = None
            dist = d_new.size
        else:
            n_in, n_out = diff_sizes(d_new, item[0])
            dist = n_in + n_out
        if best_dist is None or dist < best_dist:
            best_slot, best_dist = s, dist
    return best_slot, best_dist


def _refresh_into(store: CounterStore, slot: int, dist: int, d_new: BinaryDataset) -> PairFrequencyCounter:
    t = d_new.table
    item = store.slots[slot]
    if store.incremental and item is not None and dist < d_new.size:
        old, fq = item
        if dist:
            ok = _update_towards(fq.counts, fq.class_totals, t.indptr, t.indices,
                                 d_new.ids, d_new.offsets, old.ids, old.offsets)
            if not ok:
                raise InternalError("incremental frequency update went negative")
        store.incremental_builds += 1
    else:
        fq = item[1] if item is not None else PairFrequencyCounter(t.n_classes, t.n_features)
        fq.counts.fill(0)
        fq.class_totals.fill(0)
        _add_instances(fq.counts, fq.class_totals, t.indptr, t.indices, d_new.ids, d_new.offsets, 1)
        store.scratch_builds += 1
    fq.fingerprint = (d_new.hash(), d_new.size)
    store.slots[slot] = (d_new, fq)
    return fq


def choose_counter_and_refresh(store: CounterStore, d_new: BinaryDataset) -> PairFrequencyCounter:
    _check_shape(store, d_new)
    slot, dist = _nearest_slot(store, d_new)
    return _refresh_into(store, slot, dist, d_new)


def _parent_counter(store: CounterStore, parent: BinaryDataset) -> PairFrequencyCounter:
    item = store.parent
    if item is not None and item[0] is parent:
        return item[1]
    t = parent.table
    if item is not None and item[0].table is t:
        old, fq = item
        n_in, n_out = diff_sizes(parent, old)
        if n_in + n_out < parent.size:
            if not _update_towards(fq.counts, fq.class_totals, t.indptr, t.indices,
                                   parent.ids, parent.offsets, old.ids, old.offsets):
                raise InternalError("incremental frequency update went negative")
            store.parent = (parent, fq)
            store.parent_builds += 1
            return fq
    fq = build_counts(parent)
    store.parent = (parent, fq)
    store.parent_builds += 1
    return fq


def refresh_with_sibling(store: CounterStore, d_new: BinaryDataset, parent: BinaryDataset,
                         sibling: BinaryDataset) -> PairFrequencyCounter:
    """Counter of ``d_new`` where ``d_new`` and ``sibling`` partition ``parent``.

    Falls back to :func:`choose_counter_and_refresh` unless counting the
    sibling is cheaper than refreshing ``d_new`` directly, in which case the
    sibling is refreshed into one slot and ``d_new`` becomes
    ``parent - sibling`` in the other.
    """
    _check_shape(store, d_new)
    slot, dist = _nearest_slot(store, d_new)
    cost_direct = min(dist, d_new.size)
    if not store.incremental or cost_direct == 0 or d_new.size + sibling.size != parent.size:
        return _refresh_into(store, slot, dist, d_new)
    s_slot, s_dist = _nearest_slot(store, sibling)
    if min(s_dist, sibling.size) >= cost_direct:
        return _refresh_into(store, slot, dist, d_new)
    fq_parent = _parent_counter(store, parent)
    fq_sib = _refresh_into(store, s_slot, s_dist, sibling)
    other = 1 - s_slot
    item = store.slots[other]
    fq = item[1] if item is not None else PairFrequencyCounter(store.n_classes, store.n_features)
    np.subtract(fq_parent.counts, fq_sib.counts, out=fq.counts)
    np.subtract(fq_parent.class_totals, fq_sib.class_totals, out=fq.class_totals)
    fq.fingerprint = (d_new.hash(), d_new.size)
    store.slots[other] = (d_new, fq)
    store.derived_builds += 1
    return fq
