import numpy as np
import pytest

from dptree import BinaryDataset, InputError
from dptree.testing import onehot_surrogate
from dptree.tuning import default_grid, stratified_folds, tune


def test_default_grid():
    grid = default_grid(2)
    assert grid == [(1, 1), (2, 1), (2, 2), (2, 3)]
    assert len(default_grid(4)) == 1 + 3 + 7 + 15


def test_two_folds_on_four_balanced_instances():
    y = np.array([0, 0, 1, 1])
    for _, test in stratified_folds(y, 2, seed=0):
        assert sorted(y[test].tolist()) == [0, 1]


def test_too_few_instances_per_class():
    with pytest.raises(InputError):
        stratified_folds(np.array([0, 0, 0, 1]), 2, 0)
    with pytest.raises(InputError):
        stratified_folds(np.array([0, 1]), 1, 0)


def test_single_cell_wins():
    d = onehot_surrogate(0, 60, 10, 3)
    res = tune(d, [(2, 2)], k=3)
    assert (res.best_depth, res.best_nodes) == (2, 2) and len(res.table) == 1


def test_seeded_runs_are_identical():
    d = onehot_surrogate(4, 90, 12, 4, noise=0.1)
    a, b = tune(d, default_grid(2), k=3, seed=7), tune(d, default_grid(2), k=3, seed=7)
    assert all(np.array_equal(x[1], y[1]) for x, y in zip(a.folds, b.folds))
    assert (a.best_depth, a.best_nodes, a.table) == (b.best_depth, b.best_nodes, b.table)


def test_tie_break_prefers_smaller_trees():
    # label equals feature 0: every cell reaches perfect test accuracy
    rng = np.random.default_rng(0)
    X = (rng.random((40, 4)) < 0.5).astype(np.uint8)
    res = tune(BinaryDataset.from_arrays(X, X[:, 0]), default_grid(3), k=4)
    assert (res.best_depth, res.best_nodes) == (1, 1)
    assert res.tree.misclassifications(X, X[:, 0]) == 0
