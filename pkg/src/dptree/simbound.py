"""Lower bounds from previously solved datasets at the same depth.

If ``D_old`` has optimum ``t`` under a budget and ``D_new`` differs from it by
removing ``|D_out|`` instances (and adding some others), no tree can do better
on ``D_new`` than ``t - |D_out|``: dropping instances removes at most one
misclassification each, and added instances never reduce the count.
"""
from __future__ import annotations

from .dataset import BinaryDataset, datasets_equal, diff_sizes


def similarity_lower_bound(t_old: int, d_out_size: int) -> int:
    return max(0, t_old - d_out_size)


class SimilarityTracker:
    """Two (dataset, cache key) records per depth budget.

    A record does not copy results; its cache key is queried for the optimum
    of the exact (depth, nodes) budget when a bound is requested.
    """

    def __init__(self):
        self.slots: dict[int, list] = {}
        self.bounds_injected = 0
        self.transfers = 0
        self.last_bound = 0

    def records(self, depth: int) -> list:
        slots = self.slots.get(depth)
        if slots is None:
            slots = self.slots[depth] = [None, None]
        return slots

    def clear(self) -> None:
        self.slots.clear()


def update_cache_using_similarity(tracker: SimilarityTracker, cache, d_new: BinaryDataset, key,
                                  d: int, n: int, log: list | None = None) -> bool:
    """Inject the strongest similarity bound for ``(d, n)`` into ``cache``.

    Returns True iff an equal dataset was found and its transfer made an
    optimum for ``(d, n)`` available under ``key``.
    """
    slots = tracker.slots.get(d)
    if not slots:
        return False
    best = 0
    for rec in slots:
        if rec is None:
            continue
        d_old, old_key = rec
        if d_old.table is not d_new.table:
            continue
        if datasets_equal(d_old, d_new):
            cache.transfer_entries(old_key, key)
            tracker.transfers += 1
            if cache.retrieve_optimal(key, d, n) is not None:
                return True
            continue
        opt = cache.retrieve_optimal(old_key, d, n)
        if opt is None:
            continue
        # per-class size gaps bound |D_out| from below; skip the merge when even that cannot help
        min_out = sum(max(0, a - b) for a, b in zip(d_old.class_sizes, d_new.class_sizes))
        if opt.score - min_out <= best:
            continue
        n_out = diff_sizes(d_new, d_old)[1]
        bound = similarity_lower_bound(opt.score, n_out)
        if bound > best:
            best = bound
    tracker.last_bound = best
    if best > 0:
        cache.store_lower_bound(key, d, n, best)
        tracker.bounds_injected += 1
        if log is not None:
            log.append(("similarity", d_new, d, n, best))
    return False


def replace_dataset_for_similarity(tracker: SimilarityTracker, d: BinaryDataset, depth: int, key) -> None:
    """Overwrite the record most similar to ``d`` (an empty slot is filled first; ties go to slot 0)."""
    slots = tracker.records(depth)
    target = None
    best = None
    for s, rec in enumerate(slots):
        if rec is None:
            target = s
            break
        old = rec[0]
        if old.table is not d.table:
            target = s
            break
        if datasets_equal(old, d):
            target = s
            break
        n_in, n_out = diff_sizes(d, old)
        if best is None or n_in + n_out < best:
            best = n_in + n_out
            target = s
    slots[target] = (d, key)
