"""Binary datasets as id-sorted, class-partitioned views over a shared instance table.

A :class:`BinaryDataset` never copies feature vectors.  It stores the ids of the
instances it contains, grouped by class and ascending within each class, and
refers to an :class:`InstanceTable` for the actual bits.  Splitting, set
differences and hashing all work on the id arrays.
"""
from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np
from numba import njit

from .errors import InputError

ID_DTYPE = np.int32

_HASH_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B9


def hash_int_array(values: Iterable[int]) -> int:
    """Boost-style ``hash_combine`` over an integer array, 64-bit wrap-around."""
    values = list(values)
    k = len(values)
    for a in values:
        k ^= (a + _GOLDEN + (k << 6) + (k >> 2)) & _HASH_MASK
        k &= _HASH_MASK
    return k


@njit(cache=True)
def _hash_ids(ids):
    k = np.uint64(ids.shape[0])
    golden = np.uint64(0x9E3779B9)
    six = np.uint64(6)
    two = np.uint64(2)
    for i in range(ids.shape[0]):
        k ^= np.uint64(ids[i]) + golden + (k << six) + (k >> two)
    return k


@njit(cache=True)
def _split_kernel(column, ids, offsets):
    n_classes = offsets.shape[0] - 1
    n_true = 0
    for k in range(ids.shape[0]):
        if column[ids[k]]:
            n_true += 1
    ids_true = np.empty(n_true, ids.dtype)
    ids_false = np.empty(ids.shape[0] - n_true, ids.dtype)
    off_true = np.zeros(n_classes + 1, np.int64)
    off_false = np.zeros(n_classes + 1, np.int64)
    t = 0
    f = 0
    for c in range(n_classes):
        for k in range(offsets[c], offsets[c + 1]):
            i = ids[k]
            if column[i]:
                ids_true[t] = i
                t += 1
            else:
                ids_false[f] = i
                f += 1
        off_true[c + 1] = t
        off_false[c + 1] = f
    return ids_false, off_false, ids_true, off_true


@njit(cache=True)
def _diff_sizes(new_ids, new_off, old_ids, old_off):
    """Return (|new \\ old|, |old \\ new|) by a per-class merge."""
    n_in = 0
    n_out = 0
    for c in range(new_off.shape[0] - 1):
        a = new_off[c]
        a_end = new_off[c + 1]
        b = old_off[c]
        b_end = old_off[c + 1]
        while a < a_end and b < b_end:
            x = new_ids[a]
            y = old_ids[b]
            if x == y:
                a += 1
                b += 1
            elif x < y:
                n_in += 1
                a += 1
            else:
                n_out += 1
                b += 1
        n_in += a_end - a
        n_out += b_end - b
    return n_in, n_out


@njit(cache=True)
def _diff_kernel(new_ids, new_off, old_ids, old_off):
    n_classes = new_off.shape[0] - 1
    ids_in = np.empty(new_ids.shape[0], new_ids.dtype)
    ids_out = np.empty(old_ids.shape[0], old_ids.dtype)
    off_in = np.zeros(n_classes + 1, np.int64)
    off_out = np.zeros(n_classes + 1, np.int64)
    p = 0
    q = 0
    for c in range(n_classes):
        a = new_off[c]
        a_end = new_off[c + 1]
        b = old_off[c]
        b_end = old_off[c + 1]
        while a < a_end and b < b_end:
            x = new_ids[a]
            y = old_ids[b]
            if x == y:
                a += 1
                b += 1
            elif x < y:
                ids_in[p] = x
                p += 1
                a += 1
            else:
                ids_out[q] = y
                q += 1
                b += 1
        while a < a_end:
            ids_in[p] = new_ids[a]
            p += 1
            a += 1
        while b < b_end:
            ids_out[q] = old_ids[b]
            q += 1
            b += 1
        off_in[c + 1] = p
        off_out[c + 1] = q
    return ids_in[:p].copy(), off_in, ids_out[:q].copy(), off_out


class Instance(NamedTuple):
    id: int
    features: tuple[int, ...]
    label: int


class Literal(NamedTuple):
    """A feature together with a polarity; encoded as ``2*feature + present``."""

    feature: int
    present: bool = True

    def encode(self) -> int:
        return 2 * self.feature + int(self.present)

    @classmethod
    def decode(cls, code: int) -> "Literal":
        return cls(code >> 1, bool(code & 1))

    def __invert__(self) -> "Literal":
        return Literal(self.feature, not self.present)


class Branch(tuple):
    """Sorted tuple of encoded literals identifying a root-to-node path."""

    __slots__ = ()

    def __new__(cls, literals: Iterable = ()):
        codes = sorted(lit.encode() if isinstance(lit, Literal) else int(lit) for lit in literals)
        for a, b in zip(codes, codes[1:]):
            if a >> 1 == b >> 1:
                raise InputError(f"branch tests feature {a >> 1} twice")
        return super().__new__(cls, codes)

    def __hash__(self) -> int:
        return hash_int_array(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, Branch) and tuple.__eq__(self, other)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def child(self, feature: int, present: bool) -> "Branch":
        code = 2 * feature + int(present)
        out = list(self)
        lo, hi = 0, len(out)
        while lo < hi:
            mid = (lo + hi) // 2
            if out[mid] < code:
                lo = mid + 1
            else:
                hi = mid
        out.insert(lo, code)
        # codes are already sorted; skip the validating constructor
        return tuple.__new__(Branch, out)

    def literals(self) -> list[Literal]:
        return [Literal.decode(c) for c in self]


class InstanceTable:
    """The root feature matrix and labels shared by every dataset view."""

    __slots__ = ("features", "labels", "n_classes", "n_features", "columns", "indptr", "indices")

    def __init__(self, features: np.ndarray, labels: np.ndarray, n_classes: int | None = None):
        features = np.ascontiguousarray(features, dtype=np.uint8)
        labels = np.ascontiguousarray(labels, dtype=np.int64)
        if features.ndim != 2:
            raise InputError("feature matrix must be two-dimensional")
        if labels.shape != (features.shape[0],):
            raise InputError("label vector length does not match the number of instances")
        if features.size and features.max() > 1:
            raise InputError("features must be binary (0/1)")
        if labels.size and labels.min() < 0:
            raise InputError("class labels must be non-negative")
        inferred = int(labels.max()) + 1 if labels.size else 2
        n_classes = max(inferred, 2) if n_classes is None else n_classes
        if n_classes < inferred:
            raise InputError(f"label {inferred - 1} out of range for {n_classes} classes")
        self.features = features
        self.labels = labels
        self.n_classes = n_classes
        self.n_features = features.shape[1]
        self.columns = np.ascontiguousarray(features.T.astype(np.bool_))
        # sparse rows for pair counting
        rows, cols = np.nonzero(features)
        self.indptr = np.zeros(features.shape[0] + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=features.shape[0]), out=self.indptr[1:])
        self.indices = cols.astype(np.int32)


class BinaryDataset:
    """Immutable set of instances from one :class:`InstanceTable`.

    ``ids`` holds class 0's ids ascending, then class 1's, and so on;
    ``offsets[c]:offsets[c+1]`` delimits class ``c``.
    """

    __slots__ = ("table", "ids", "offsets", "class_sizes", "_hash")

    def __init__(self, table: InstanceTable, ids: np.ndarray, offsets: np.ndarray):
        self.table = table
        self.ids = ids
        self.offsets = offsets
        self.class_sizes = tuple((offsets[1:] - offsets[:-1]).tolist())
        self._hash = None

    @classmethod
    def from_arrays(cls, features, labels, n_classes: int | None = None) -> "BinaryDataset":
        """Build a root dataset; instance ids are the row indices."""
        table = InstanceTable(np.asarray(features), np.asarray(labels), n_classes)
        order = np.argsort(table.labels, kind="stable").astype(ID_DTYPE)
        counts = np.bincount(table.labels, minlength=table.n_classes)
        offsets = np.zeros(table.n_classes + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        return cls(table, order, offsets)

    @classmethod
    def from_instances(cls, instances: Sequence[Instance], n_features: int | None = None,
                       n_classes: int | None = None) -> "BinaryDataset":
        """Build a root dataset from instances whose ids are exactly ``0..N-1``."""
        if not instances:
            if n_features is None:
                raise InputError("cannot infer the feature count of an empty dataset")
            return cls.from_arrays(np.zeros((0, n_features), np.uint8), np.zeros(0, np.int64), n_classes)
        by_id = sorted(instances, key=lambda inst: inst.id)
        if [inst.id for inst in by_id] != list(range(len(by_id))):
            raise InputError("instance ids must be exactly 0..N-1")
        widths = {len(inst.features) for inst in by_id}
        if len(widths) != 1:
            raise InputError("instances disagree on the number of features")
        X = np.array([inst.features for inst in by_id], dtype=np.uint8)
        y = np.array([inst.label for inst in by_id], dtype=np.int64)
        return cls.from_arrays(X, y, n_classes)

    def subset(self, ids: Iterable[int]) -> "BinaryDataset":
        """View over the given ids of this dataset's table (ids need not be sorted)."""
        ids = np.unique(np.asarray(list(ids), dtype=np.int64))
        if ids.size and (ids[0] < 0 or ids[-1] >= self.table.labels.shape[0]):
            raise InputError("instance id out of range")
        labels = self.table.labels[ids]
        order = np.argsort(labels, kind="stable")
        counts = np.bincount(labels, minlength=self.n_classes)
        offsets = np.zeros(self.n_classes + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        return BinaryDataset(self.table, ids[order].astype(ID_DTYPE), offsets)

    def empty(self) -> "BinaryDataset":
        return BinaryDataset(self.table, np.empty(0, ID_DTYPE), np.zeros(self.n_classes + 1, np.int64))

    @property
    def n_features(self) -> int:
        return self.table.n_features

    feature_count = n_features

    @property
    def n_classes(self) -> int:
        return self.table.n_classes

    class_count = n_classes

    @property
    def size(self) -> int:
        return self.ids.shape[0]

    def __len__(self) -> int:
        return self.ids.shape[0]

    def class_ids(self, c: int) -> np.ndarray:
        return self.ids[self.offsets[c]:self.offsets[c + 1]]

    def id_set(self) -> set[int]:
        return set(self.ids.tolist())

    def instances(self) -> Iterator[Instance]:
        for c in range(self.n_classes):
            for i in self.class_ids(c).tolist():
                yield Instance(i, tuple(self.table.features[i].tolist()), c)

    def feature_matrix(self) -> np.ndarray:
        return self.table.features[self.ids]

    def labels(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_classes), self.class_sizes)

    def hash(self) -> int:
        if self._hash is None:
            self._hash = int(_hash_ids(self.ids))
        return self._hash

    def __repr__(self) -> str:
        return f"BinaryDataset(size={self.size}, class_sizes={self.class_sizes}, features={self.n_features})"


def split(d: BinaryDataset, lit: Literal) -> BinaryDataset:
    """Instances of ``d`` whose value of ``lit.feature`` matches ``lit.present``."""
    absent, present = split_on_feature(d, lit.feature)
    return present if lit.present else absent


def split_on_feature(d: BinaryDataset, feature: int) -> tuple[BinaryDataset, BinaryDataset]:
    """Return ``(d(not f), d(f))``."""
    if not 0 <= feature < d.table.n_features:
        raise InputError(f"feature index {feature} out of range [0, {d.table.n_features})")
    ids_f, off_f, ids_t, off_t = _split_kernel(d.table.columns[feature], d.ids, d.offsets)
    return BinaryDataset(d.table, ids_f, off_f), BinaryDataset(d.table, ids_t, off_t)


def diff_sizes(d_new: BinaryDataset, d_old: BinaryDataset) -> tuple[int, int]:
    """``(|d_new \\ d_old|, |d_old \\ d_new|)`` without materialising either set."""
    n_in, n_out = _diff_sizes(d_new.ids, d_new.offsets, d_old.ids, d_old.offsets)
    return int(n_in), int(n_out)


def dataset_diff(d_new: BinaryDataset, d_old: BinaryDataset) -> tuple[BinaryDataset, BinaryDataset]:
    """Return ``(d_new \\ d_old, d_old \\ d_new)`` in one linear merge per class."""
    ids_in, off_in, ids_out, off_out = _diff_kernel(d_new.ids, d_new.offsets, d_old.ids, d_old.offsets)
    return BinaryDataset(d_new.table, ids_in, off_in), BinaryDataset(d_new.table, ids_out, off_out)


def dataset_hash(d: BinaryDataset) -> int:
    return d.hash()


def datasets_equal(a: BinaryDataset, b: BinaryDataset) -> bool:
    if a is b:
        return True
    if a.ids.shape[0] != b.ids.shape[0] or a.class_sizes != b.class_sizes:
        return False
    if a.hash() != b.hash():
        return False
    return bool(np.array_equal(a.ids, b.ids))


def leaf_misclassification(d: BinaryDataset) -> int:
    """Instances outside the majority class; 0 for an empty dataset."""
    sizes = d.class_sizes
    return sum(sizes) - max(sizes) if sizes else 0


def majority_class(d: BinaryDataset) -> int:
    sizes = d.class_sizes
    return max(range(len(sizes)), key=lambda c: (sizes[c], -c))
