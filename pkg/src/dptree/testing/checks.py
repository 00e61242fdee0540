"""Structural checks on solver output shared by the test suites."""
from __future__ import annotations

import numpy as np

from ..dataset import BinaryDataset
from ..tree import DecisionTree, LeafNode


def tree_violations(tree: DecisionTree, dataset: BinaryDataset, objective: int | None = None) -> list[str]:
    """Empty when the tree replays to ``objective``, never repeats a feature on a path
    and every predicate node sends at least one training instance each way."""
    problems = []
    X, y = dataset.feature_matrix(), dataset.labels()
    expected = tree.objective if objective is None else objective
    replay = tree.misclassifications(X, y)
    if expected is not None and replay != expected:
        problems.append(f"replay {replay} != objective {expected}")

    def rec(node, rows, seen):
        if isinstance(node, LeafNode):
            return
        if node.feature in seen:
            problems.append(f"feature {node.feature} tested twice on one path")
        has = X[rows, node.feature].astype(bool)
        if rows.size and (has.all() or not has.any()):
            problems.append(f"degenerate node on feature {node.feature}")
        rec(node.left, rows[~has], seen | {node.feature})
        rec(node.right, rows[has], seen | {node.feature})

    rec(tree.root, np.arange(X.shape[0]), frozenset())
    return problems
