"""Memoisation of optimal subtree roots and lower bounds.

A cache maps a subproblem key to a short list of :class:`CacheEntry`, one per
(depth, node) budget.  Two key kinds exist: the :class:`~dptree.dataset.Branch`
leading to the node (tables indexed by branch length) and the dataset itself
(tables indexed by instance count, exact id comparison on hash match).
"""
from __future__ import annotations

from typing import Iterator, NamedTuple

import numpy as np

from .dataset import BinaryDataset, Branch, datasets_equal, hash_int_array
from .errors import ConfigError, InputError, InternalError

__all__ = [
    "OptimalRecord", "CacheEntry", "BranchCache", "DatasetCache", "make_cache", "hash_int_array",
    "normalize_budget",
]


def normalize_budget(d: int, n: int) -> tuple[int, int]:
    """Clamp ``n`` to ``2^d - 1`` and then ``d`` to ``n``."""
    if d < 0 or n < 0:
        raise InputError("depth and node budgets must be non-negative")
    if d < 62:
        n = min(n, (1 << d) - 1)
    return min(d, n), n


class OptimalRecord(NamedTuple):
    """Root of an optimal subtree; ``feature == -1`` means a single leaf."""

    feature: int
    left_nodes: int
    right_nodes: int
    score: int
    depth: int

    @property
    def nodes(self) -> int:
        return 0 if self.feature < 0 else 1 + self.left_nodes + self.right_nodes

    @classmethod
    def leaf(cls, score: int) -> "OptimalRecord":
        return cls(-1, 0, 0, score, 0)


class CacheEntry:
    __slots__ = ("depth", "nodes", "lower_bound", "optimal")

    def __init__(self, depth: int, nodes: int, lower_bound: int = 0, optimal: OptimalRecord | None = None):
        self.depth = depth
        self.nodes = nodes
        self.lower_bound = lower_bound
        self.optimal = optimal

    def __repr__(self) -> str:
        return f"CacheEntry(d={self.depth}, n={self.nodes}, lb={self.lower_bound}, optimal={self.optimal})"


class _Cache:
    kind = ""

    def __init__(self, use_buffer: bool = True):
        self.use_buffer = use_buffer
        self.tables: dict[int, dict] = {}
        self._buffers: dict[int, list] = {}
        self.buffer_hits = 0

    # key plumbing, specialised per kind
    def _table_index(self, key) -> int:
        raise NotImplementedError

    def _find(self, table: dict, key):
        raise NotImplementedError

    def _insert(self, table: dict, key, entries: list) -> None:
        raise NotImplementedError

    def _same_key(self, a, b) -> bool:
        raise NotImplementedError

    def _check_key(self, key) -> None:
        raise NotImplementedError

    def lookup_with_buffer(self, key, create: bool = False) -> list | None:
        """Entry list for ``key``; the two most recent resolutions per table are tried first."""
        idx = self._table_index(key)
        buf = self._buffers.get(idx) if self.use_buffer else None
        if buf:
            for k, entries in buf:
                if self._same_key(k, key):
                    self.buffer_hits += 1
                    return entries
        table = self.tables.get(idx)
        entries = self._find(table, key) if table is not None else None
        if entries is None:
            if not create:
                return None
            self._check_key(key)
            if table is None:
                table = self.tables[idx] = {}
            entries = []
            self._insert(table, key, entries)
        if self.use_buffer:
            if buf is None:
                buf = self._buffers[idx] = []
            buf.insert(0, (key, entries))
            del buf[2:]
        return entries

    lookup = lookup_with_buffer

    @staticmethod
    def _entry(entries: list, d: int, n: int) -> CacheEntry:
        for e in entries:
            if e.depth == d and e.nodes == n:
                return e
        e = CacheEntry(d, n)
        entries.append(e)
        return e

    def store_optimal(self, key, d: int, n: int, record: OptimalRecord) -> None:
        """Record an optimal root for (d, n) and every smaller budget the tree still fits."""
        d, n = normalize_budget(d, n)
        if d < 1:
            return
        if record.nodes > n or record.depth > d:
            raise InternalError(f"optimal record {record} exceeds its budget ({d}, {n})")
        entries = self.lookup_with_buffer(key, create=True)
        lo_d = max(1, record.depth)
        lo_n = max(1, record.nodes)
        for dd in range(lo_d, d + 1):
            for nn in range(max(lo_n, dd), n + 1):
                if dd < 62 and nn > (1 << dd) - 1:
                    break
                e = self._entry(entries, dd, nn)
                if e.optimal is not None:
                    if e.optimal.score != record.score:
                        raise InternalError(
                            f"conflicting optimal scores {e.optimal.score} != {record.score} at ({dd}, {nn})")
                    continue
                if e.lower_bound > record.score:
                    raise InternalError(
                        f"stored lower bound {e.lower_bound} exceeds optimum {record.score} at ({dd}, {nn})")
                e.optimal = record
                e.lower_bound = record.score

    def store_lower_bound(self, key, d: int, n: int, lb: int) -> None:
        d, n = normalize_budget(d, n)
        if d < 1:
            return
        entries = self.lookup_with_buffer(key, create=True)
        e = self._entry(entries, d, n)
        if e.optimal is not None:
            if lb > e.optimal.score:
                raise InternalError(f"lower bound {lb} exceeds cached optimum {e.optimal.score}")
            return
        if lb > e.lower_bound:
            e.lower_bound = lb

    def retrieve_lower_bound(self, key, d: int, n: int) -> int:
        """Largest bound among entries with depth >= d and nodes >= n; 0 if none."""
        d, n = normalize_budget(d, n)
        entries = self.lookup_with_buffer(key)
        best = 0
        if entries:
            for e in entries:
                if e.depth >= d and e.nodes >= n and e.lower_bound > best:
                    best = e.lower_bound
        return best

    def retrieve_optimal(self, key, d: int, n: int) -> OptimalRecord | None:
        d, n = normalize_budget(d, n)
        entries = self.lookup_with_buffer(key)
        if not entries:
            return None
        fallback = None
        for e in entries:
            rec = e.optimal
            if rec is None:
                continue
            if e.depth == d and e.nodes == n:
                return rec
            if (fallback is None and e.depth >= d and e.nodes >= n
                    and rec.nodes <= n and rec.depth <= d):
                fallback = rec
        return fallback

    def is_optimal_in_cache(self, key, d: int, n: int) -> bool:
        return self.retrieve_optimal(key, d, n) is not None

    def entries_for(self, key) -> list[CacheEntry]:
        return list(self.lookup_with_buffer(key) or [])

    def transfer_entries(self, from_key, to_key, from_dataset: BinaryDataset | None = None,
                         to_dataset: BinaryDataset | None = None) -> None:
        """Merge every entry of ``from_key`` into ``to_key``; the keyed datasets must be equal."""
        if from_dataset is not None and to_dataset is not None and not datasets_equal(from_dataset, to_dataset):
            raise InputError("transfer_entries between unequal datasets")
        if self._same_key(from_key, to_key):
            return
        source = self.lookup_with_buffer(from_key)
        if not source:
            return
        for e in list(source):
            if e.optimal is not None:
                self._store_exact_optimal(to_key, e.depth, e.nodes, e.optimal)
            elif e.lower_bound > 0:
                self.store_lower_bound(to_key, e.depth, e.nodes, e.lower_bound)

    def _store_exact_optimal(self, key, d: int, n: int, record: OptimalRecord) -> None:
        entries = self.lookup_with_buffer(key, create=True)
        e = self._entry(entries, d, n)
        if e.optimal is not None:
            if e.optimal.score != record.score:
                raise InternalError("conflicting optimal scores during transfer")
            return
        if e.lower_bound > record.score:
            raise InternalError("transferred optimum is below an existing lower bound")
        e.optimal = record
        e.lower_bound = record.score

    def statistics(self) -> dict:
        per_table = {}
        n_keys = 0
        n_entries = 0
        for idx, (key, entries) in self._iter_keys():
            per_table[idx] = per_table.get(idx, 0) + len(entries)
            n_keys += 1
            n_entries += len(entries)
        return {"kind": self.kind, "keys": n_keys, "entries": n_entries,
                "entries_per_table": dict(sorted(per_table.items())), "buffer_hits": self.buffer_hits}

    def _iter_keys(self):
        raise NotImplementedError

    def iter_entries(self) -> Iterator[tuple[object, CacheEntry]]:
        for _, (key, entries) in self._iter_keys():
            for e in entries:
                yield key, e

    def __len__(self) -> int:
        return sum(len(entries) for _, (_, entries) in self._iter_keys())


class BranchCache(_Cache):
    """Keys are branches; table ``k`` holds branches of length ``k``."""

    kind = "branch"

    def _table_index(self, key) -> int:
        return len(key)

    def _find(self, table, key):
        return table.get(key)

    def _insert(self, table, key, entries):
        table[key] = entries

    def _same_key(self, a, b) -> bool:
        return a == b

    def _check_key(self, key) -> None:
        if not isinstance(key, Branch):
            raise InputError("branch cache keys must be Branch instances")

    def _iter_keys(self):
        for idx, table in self.tables.items():
            for key, entries in table.items():
                yield idx, (key, entries)


class DatasetCache(_Cache):
    """Keys are datasets; table ``m`` holds datasets with ``m`` instances, bucketed by hash."""

    kind = "dataset"

    def _table_index(self, key) -> int:
        return key.ids.shape[0]

    def _find(self, table, key):
        bucket = table.get(key.hash())
        if bucket is None:
            return None
        for other, entries in bucket:
            if other is key or (other.class_sizes == key.class_sizes and np.array_equal(other.ids, key.ids)):
                return entries
        return None

    def _insert(self, table, key, entries):
        table.setdefault(key.hash(), []).append((key, entries))

    def _same_key(self, a, b) -> bool:
        return datasets_equal(a, b)

    def _check_key(self, key) -> None:
        if not isinstance(key, BinaryDataset):
            raise InputError("dataset cache keys must be BinaryDataset instances")

    def _iter_keys(self):
        for idx, table in self.tables.items():
            for bucket in table.values():
                for key, entries in bucket:
                    yield idx, (key, entries)


def make_cache(kind: str, use_buffer: bool = True) -> _Cache:
    if kind == "dataset":
        return DatasetCache(use_buffer)
    if kind == "branch":
        return BranchCache(use_buffer)
    raise ConfigError(f"unknown cache kind {kind!r} (expected 'dataset' or 'branch')")
