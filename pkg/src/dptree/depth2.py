"""Optimal trees of depth at most two computed from frequency counters alone.

One pass over all (root, child) feature pairs gives the best left and right
child of every root; the best trees using one, two and three feature nodes
fall out of the same pass.  Trees are compared lexicographically by
(misclassifications, feature nodes, root, left child, right child), with
``-1`` standing for "no feature" (a leaf).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .dataset import BinaryDataset, Literal
from .errors import InputError
from .freqcount import CounterStore, PairFrequencyCounter, choose_counter_and_refresh, derived_count

_INF = np.int64(1 << 60)


@njit(cache=True)
def _offer(best, k, score, nodes, root, left, right):
    b = best[k]
    if score < b[0] or (score == b[0] and (
            nodes < b[1] or (nodes == b[1] and (
            root < b[2] or (root == b[2] and (
            left < b[3] or (left == b[3] and right < b[4]))))))):
        b[0] = score
        b[1] = nodes
        b[2] = root
        b[3] = left
        b[4] = right


@njit(cache=True)
def _child_score(counts, totals, n_classes, root, child, right_side):
    """Misclassifications of ``child`` splitting one side of ``root``; -1 if degenerate."""
    lo = root if root < child else child
    hi = child if root < child else root
    sum_a = 0
    sum_b = 0
    max_a = 0
    max_b = 0
    for c in range(n_classes):
        both = counts[c, lo, hi]
        if right_side:
            a = both
            b = counts[c, root, root] - both
        else:
            a = counts[c, child, child] - both
            b = totals[c] - counts[c, root, root] - a
        sum_a += a
        sum_b += b
        if a > max_a:
            max_a = a
        if b > max_b:
            max_b = b
    if sum_a == 0 or sum_b == 0:
        return -1
    return (sum_a - max_a) + (sum_b - max_b)


@njit(cache=True)
def _depth2_kernel(counts, totals, halved):
    n_classes = counts.shape[0]
    n_features = counts.shape[1]
    total = 0
    biggest = 0
    for c in range(n_classes):
        total += totals[c]
        if totals[c] > biggest:
            biggest = totals[c]
    leaf = total - biggest

    best_left = np.full(n_features, _INF, np.int64)
    best_left_f = np.full(n_features, -1, np.int64)
    best_right = np.full(n_features, _INF, np.int64)
    best_right_f = np.full(n_features, -1, np.int64)
    usable = np.zeros(n_features, np.bool_)
    for f in range(n_features):
        present = 0
        for c in range(n_classes):
            present += counts[c, f, f]
        usable[f] = 0 < present < total

    if halved and n_classes == 2:
        t0 = totals[0]
        t1 = totals[1]
        for i in range(n_features):
            if not usable[i]:
                continue
            r0 = counts[0, i]
            r1 = counts[1, i]
            si0 = r0[i]
            si1 = r1[i]
            for j in range(i + 1, n_features):
                if not usable[j]:
                    continue
                b0 = r0[j]
                b1 = r1[j]
                sj0 = counts[0, j, j]
                sj1 = counts[1, j, j]
                # root i, left side: (j present, j absent) among i absent
                p0 = sj0 - b0
                p1 = sj1 - b1
                q0 = t0 - si0 - p0
                q1 = t1 - si1 - p1
                if p0 + p1 > 0 and q0 + q1 > 0:
                    s = min(p0, p1) + min(q0, q1)
                    if s < best_left[i]:
                        best_left[i] = s
                        best_left_f[i] = j
                # root i, right side
                q0 = si0 - b0
                q1 = si1 - b1
                if b0 + b1 > 0 and q0 + q1 > 0:
                    s = min(b0, b1) + min(q0, q1)
                    if s < best_right[i]:
                        best_right[i] = s
                        best_right_f[i] = j
                # root j, left side
                p0 = si0 - b0
                p1 = si1 - b1
                q0 = t0 - sj0 - p0
                q1 = t1 - sj1 - p1
                if p0 + p1 > 0 and q0 + q1 > 0:
                    s = min(p0, p1) + min(q0, q1)
                    if s < best_left[j]:
                        best_left[j] = s
                        best_left_f[j] = i
                # root j, right side
                q0 = sj0 - b0
                q1 = sj1 - b1
                if b0 + b1 > 0 and q0 + q1 > 0:
                    s = min(b0, b1) + min(q0, q1)
                    if s < best_right[j]:
                        best_right[j] = s
                        best_right_f[j] = i
    elif halved:
        # one sweep over j > i per class fills all four (root, side) leaf pairs of (i, j);
        # rows: [i-left a, i-left b, i-right a, i-right b, j-left a, j-left b, j-right a, j-right b]
        sums = np.zeros((8, n_features), np.int64)
        maxes = np.zeros((8, n_features), np.int64)
        for i in range(n_features):
            if not usable[i]:
                continue
            sums[:, i + 1:] = 0
            maxes[:, i + 1:] = 0
            for c in range(n_classes):
                row = counts[c, i]
                si = counts[c, i, i]
                tot = totals[c]
                for j in range(i + 1, n_features):
                    both = row[j]
                    sj = counts[c, j, j]
                    v0 = sj - both
                    v1 = tot - si - v0
                    v2 = both
                    v3 = si - both
                    v4 = si - both
                    v5 = tot - sj - v4
                    v6 = both
                    v7 = sj - both
                    sums[0, j] += v0
                    sums[1, j] += v1
                    sums[2, j] += v2
                    sums[3, j] += v3
                    sums[4, j] += v4
                    sums[5, j] += v5
                    sums[6, j] += v6
                    sums[7, j] += v7
                    if v0 > maxes[0, j]:
                        maxes[0, j] = v0
                    if v1 > maxes[1, j]:
                        maxes[1, j] = v1
                    if v2 > maxes[2, j]:
                        maxes[2, j] = v2
                    if v3 > maxes[3, j]:
                        maxes[3, j] = v3
                    if v4 > maxes[4, j]:
                        maxes[4, j] = v4
                    if v5 > maxes[5, j]:
                        maxes[5, j] = v5
                    if v6 > maxes[6, j]:
                        maxes[6, j] = v6
                    if v7 > maxes[7, j]:
                        maxes[7, j] = v7
            for j in range(i + 1, n_features):
                if not usable[j]:
                    continue
                for side in range(4):
                    a = 2 * side
                    if sums[a, j] == 0 or sums[a + 1, j] == 0:
                        continue
                    s = (sums[a, j] - maxes[a, j]) + (sums[a + 1, j] - maxes[a + 1, j])
                    if side == 0:
                        if s < best_left[i]:
                            best_left[i] = s
                            best_left_f[i] = j
                    elif side == 1:
                        if s < best_right[i]:
                            best_right[i] = s
                            best_right_f[i] = j
                    elif side == 2:
                        if s < best_left[j]:
                            best_left[j] = s
                            best_left_f[j] = i
                    else:
                        if s < best_right[j]:
                            best_right[j] = s
                            best_right_f[j] = i
    else:
        for i in range(n_features):
            if not usable[i]:
                continue
            for j in range(n_features):
                if j == i or not usable[j]:
                    continue
                s = _child_score(counts, totals, n_classes, i, j, False)
                if s >= 0 and s < best_left[i]:
                    best_left[i] = s
                    best_left_f[i] = j
                s = _child_score(counts, totals, n_classes, i, j, True)
                if s >= 0 and s < best_right[i]:
                    best_right[i] = s
                    best_right_f[i] = j

    # rows: budget 1, 2, 3; columns: score, nodes, root, left, right
    best = np.empty((3, 5), np.int64)
    for k in range(3):
        best[k, 0] = leaf
        best[k, 1] = 0
        best[k, 2] = -1
        best[k, 3] = -1
        best[k, 4] = -1
    for r in range(n_features):
        if not usable[r]:
            continue
        max_l = 0
        max_r = 0
        sum_l = 0
        sum_r = 0
        for c in range(n_classes):
            pr = counts[c, r, r]
            ab = totals[c] - pr
            sum_r += pr
            sum_l += ab
            if pr > max_r:
                max_r = pr
            if ab > max_l:
                max_l = ab
        leaf_l = sum_l - max_l
        leaf_r = sum_r - max_r
        one = leaf_l + leaf_r
        for k in range(3):
            _offer(best, k, one, 1, r, -1, -1)
        if best_left_f[r] >= 0:
            s = best_left[r] + leaf_r
            _offer(best, 1, s, 2, r, best_left_f[r], -1)
            _offer(best, 2, s, 2, r, best_left_f[r], -1)
        if best_right_f[r] >= 0:
            s = leaf_l + best_right[r]
            _offer(best, 1, s, 2, r, -1, best_right_f[r])
            _offer(best, 2, s, 2, r, -1, best_right_f[r])
        if best_left_f[r] >= 0 and best_right_f[r] >= 0:
            _offer(best, 2, best_left[r] + best_right[r], 3, r, best_left_f[r], best_right_f[r])
    return leaf, best


@dataclass(frozen=True)
class Depth2Tree:
    """A tree of depth <= 2; ``root == -1`` is a single leaf, ``left``/``right == -1`` leaf children."""

    score: int
    nodes: int
    root: int = -1
    left: int = -1
    right: int = -1

    @property
    def depth(self) -> int:
        if self.root < 0:
            return 0
        return 2 if (self.left >= 0 or self.right >= 0) else 1


@dataclass(frozen=True)
class Depth2Solution:
    leaf_score: int
    best_one_node: Depth2Tree
    best_two_nodes: Depth2Tree
    best_three_nodes: Depth2Tree

    def for_budget(self, depth: int, nodes: int) -> Depth2Tree:
        """Best tree within ``depth <= 2`` and ``nodes`` feature nodes."""
        if depth <= 0 or nodes <= 0:
            return Depth2Tree(self.leaf_score, 0)
        if depth == 1 or nodes == 1:
            return self.best_one_node
        if nodes == 2:
            return self.best_two_nodes
        return self.best_three_nodes


def depth2_from_counts(fq: PairFrequencyCounter, halved: bool = True) -> Depth2Solution:
    leaf, best = _depth2_kernel(fq.counts, fq.class_totals, halved)
    trees = [Depth2Tree(*(int(v) for v in row)) for row in best]
    return Depth2Solution(int(leaf), *trees)


def solve_depth2(d: BinaryDataset, counter_store: CounterStore | None = None,
                 node_budget: int = 3, halved: bool = True) -> Depth2Solution:
    """All three budgets are solved regardless of ``node_budget``."""
    if d.size == 0:
        raise InputError("solve_depth2 needs a nonempty dataset")
    if d.n_features < 1:
        raise InputError("solve_depth2 needs at least one feature")
    if not 1 <= node_budget <= 3:
        raise InputError("depth-two node budget must be 1, 2 or 3")
    if counter_store is None:
        counter_store = CounterStore(d.n_classes, d.n_features)
    fq = choose_counter_and_refresh(counter_store, d)
    return depth2_from_counts(fq, halved)


def classification_score(fq: PairFrequencyCounter, lit_a: Literal, lit_b: Literal) -> int:
    """Misclassifications of one leaf holding the instances that match both literals."""
    if lit_a.feature == lit_b.feature:
        raise InputError("classification_score needs two distinct features")
    per_class = [derived_count(fq, c, lit_a, lit_b) for c in range(fq.n_classes)]
    return sum(per_class) - max(per_class)
