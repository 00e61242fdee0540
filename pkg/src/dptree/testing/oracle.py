"""Exhaustive reference solver for small instances.

Shares nothing with the search code: instances become bits of Python ints,
one mask per class and one per feature, and every tree within the budgets is
enumerated.  For each subset and depth the recursion returns ``g[k]``, the
minimum misclassification over trees with at most ``k`` feature nodes, with a
witness tree; plain, lexicographic and sparse optima all follow from ``g``.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..dataset import BinaryDataset
from ..errors import InputError

MAX_FEATURES = 10
MAX_DEPTH = 3
MAX_NODES = 7


@dataclass(frozen=True)
class OracleResult:
    best_score: int
    best_node_count: int
    scores_by_budget: tuple  # scores_by_budget[k]: best score with at most k feature nodes
    witness: object  # ("leaf", class) or (feature, left, right)

    def best_sparse_score(self, alpha: int) -> int:
        return min(s + alpha * k for k, s in enumerate(self.scores_by_budget))

    def best_sparse(self, alpha: int) -> tuple[int, int]:
        """(misclassifications + alpha * nodes, nodes) minimised lexicographically."""
        return min((s + alpha * k, k) for k, s in enumerate(self.scores_by_budget))


def _masks(dataset: BinaryDataset):
    X = dataset.table.features
    class_masks = []
    for c in range(dataset.n_classes):
        m = 0
        for i in dataset.class_ids(c).tolist():
            m |= 1 << i
        class_masks.append(m)
    feature_masks = []
    for f in range(dataset.n_features):
        m = 0
        for i in dataset.ids.tolist():
            if X[i, f]:
                m |= 1 << i
        feature_masks.append(m)
    return class_masks, feature_masks


def _leaf(class_masks, subset):
    counts = [(m & subset).bit_count() for m in class_masks]
    top = max(counts)
    label = counts.index(top)
    return sum(counts) - top, ("leaf", label)


def _enumerate(class_masks, feature_masks, subset, depth, n):
    """List of (score, witness) for k = 0..n nodes (at most k)."""
    leaf = _leaf(class_masks, subset)
    best = [leaf] * (n + 1)
    if depth == 0 or n == 0:
        return best
    child_n = n - 1
    for f, fm in enumerate(feature_masks):
        left = _enumerate(class_masks, feature_masks, subset & ~fm, depth - 1, child_n)
        right = _enumerate(class_masks, feature_masks, subset & fm, depth - 1, child_n)
        for k in range(1, n + 1):
            for kl in range(k):
                kr = k - 1 - kl
                s = left[kl][0] + right[kr][0]
                if s < best[k][0]:
                    best[k] = (s, (f, left[kl][1], right[kr][1]))
    # at most k nodes: carry improvements forward
    for k in range(1, n + 1):
        if best[k - 1][0] < best[k][0]:
            best[k] = best[k - 1]
    return best


def witness_nodes(w) -> int:
    if w[0] == "leaf":
        return 0
    return 1 + witness_nodes(w[1]) + witness_nodes(w[2])


def witness_depth(w) -> int:
    if w[0] == "leaf":
        return 0
    return 1 + max(witness_depth(w[1]), witness_depth(w[2]))


def oracle_solve(dataset: BinaryDataset, d: int, n: int | None = None) -> OracleResult:
    if n is None:
        n = (1 << d) - 1
    if d < 0 or n < 0:
        raise InputError("budgets must be non-negative")
    if dataset.n_features > MAX_FEATURES or d > MAX_DEPTH or n > MAX_NODES:
        raise InputError(f"oracle limited to F <= {MAX_FEATURES}, d <= {MAX_DEPTH}, n <= {MAX_NODES}")
    class_masks, feature_masks = _masks(dataset)
    subset = 0
    for m in class_masks:
        subset |= m
    table = _enumerate(class_masks, feature_masks, subset, d, n)
    scores = tuple(s for s, _ in table)
    best = scores[n]
    nodes = scores.index(best)
    return OracleResult(best, nodes, scores, table[nodes][1])


def oracle_score(dataset: BinaryDataset, d: int, n: int | None = None) -> int:
    return oracle_solve(dataset, d, n).best_score
