"""Grid search over (depth, node budget) with stratified k-fold cross-validation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.model_selection import StratifiedKFold

from .dataset import BinaryDataset
from .errors import InputError
from .solver import Solver, SolverOptions
from .tree import DecisionTree


def default_grid(max_depth: int = 4) -> list[tuple[int, int]]:
    return [(d, n) for d in range(1, max_depth + 1) for n in range(1, (1 << d))]


def stratified_folds(y: np.ndarray, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    y = np.asarray(y)
    if k < 2:
        raise InputError("need at least two folds")
    counts = np.bincount(y)
    small = [c for c, m in enumerate(counts) if 0 < m < k]
    if small:
        raise InputError(f"classes {small} have fewer than {k} instances; use fewer folds")
    skf = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    return list(skf.split(np.zeros(len(y)), y))


@dataclass
class TuneResult:
    best_depth: int
    best_nodes: int
    table: list[dict]  # one row per grid cell: depth, nodes, train_accuracy, test_accuracy
    tree: DecisionTree
    tie_break: str = "highest mean test accuracy, then smaller depth, then fewer nodes"
    folds: list = field(default_factory=list, repr=False)


def tune(dataset: BinaryDataset, grid=None, k: int = 5, seed: int = 0,
         options: SolverOptions | None = None) -> TuneResult:
    """Pick (depth, nodes) by cross-validated accuracy and retrain on all data."""
    grid = sorted(set(grid or default_grid()))
    if not grid:
        raise InputError("empty tuning grid")
    X = dataset.table.features[np.sort(dataset.ids)]
    y = dataset.table.labels[np.sort(dataset.ids)]
    folds = stratified_folds(y, k, seed)
    correct_train = {cell: 0.0 for cell in grid}
    correct_test = {cell: 0.0 for cell in grid}
    for train_idx, test_idx in folds:
        train = BinaryDataset.from_arrays(X[train_idx], y[train_idx], dataset.n_classes)
        session = Solver(train, options)
        for depth, nodes in grid:
            res = session.solve(depth, nodes)
            correct_train[(depth, nodes)] += 1 - res.objective / len(train_idx)
            test_err = res.tree.misclassifications(X[test_idx], y[test_idx])
            correct_test[(depth, nodes)] += 1 - test_err / len(test_idx)
    table = [{"depth": d, "nodes": n, "train_accuracy": correct_train[(d, n)] / k,
              "test_accuracy": correct_test[(d, n)] / k} for d, n in grid]
    best = max(table, key=lambda r: (r["test_accuracy"], -r["depth"], -r["nodes"]))
    final = Solver(BinaryDataset.from_arrays(X, y, dataset.n_classes), options).solve(best["depth"], best["nodes"])
    return TuneResult(best["depth"], best["nodes"], table, final.tree, folds=folds)
