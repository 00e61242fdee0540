import numpy as np
import pytest
from hypothesis import given

from dptree import BinaryDataset, InputError, Literal
from dptree.depth2 import classification_score, depth2_from_counts, solve_depth2
from dptree.freqcount import build_counts
from dptree.testing import oracle_solve, random_small_dataset, xor_dataset

from conftest import small_datasets


def test_classification_score_binary():
    # both literals present: 4 instances of class 0, 7 of class 1, plus noise elsewhere
    X = np.array([[1, 1]] * 11 + [[0, 1]] * 3)
    y = np.array([0] * 4 + [1] * 7 + [0] * 3)
    fq = build_counts(BinaryDataset.from_arrays(X, y))
    assert classification_score(fq, Literal(0), Literal(1)) == 4


def test_classification_score_pure_and_three_class():
    X = np.ones((10, 2), np.uint8)
    pure = build_counts(BinaryDataset.from_arrays(X, np.zeros(10, np.int64)))
    assert classification_score(pure, Literal(0), Literal(1)) == 0
    mixed = build_counts(BinaryDataset.from_arrays(X, np.array([0] * 4 + [1] * 4 + [2] * 2)))
    assert classification_score(mixed, Literal(0), Literal(1)) == 6


def test_xor():
    sol = solve_depth2(xor_dataset())
    assert sol.best_three_nodes.score == 0
    assert sol.best_three_nodes.nodes == 3
    assert sol.best_one_node.score == 2
    assert sol.best_two_nodes.score == 1


def test_single_feature_separable():
    X = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1], [1, 1, 1], [0, 1, 1]])
    y = X[:, 2]
    sol = solve_depth2(BinaryDataset.from_arrays(X, y))
    assert sol.best_one_node.score == 0 and sol.best_one_node.root == 2
    assert sol.best_two_nodes.score == 0 and sol.best_three_nodes.score == 0
    assert sol.best_three_nodes.nodes == 1


def test_rejects_bad_input():
    with pytest.raises(InputError):
        solve_depth2(xor_dataset().empty())
    with pytest.raises(InputError):
        solve_depth2(xor_dataset(), node_budget=4)


@given(small_datasets(max_features=8))
def test_budgets_match_oracle(d):
    if d.size == 0:
        return
    sol = solve_depth2(d)
    assert sol.for_budget(1, 1).score == oracle_solve(d, 1, 1).best_score
    for n in (1, 2, 3):
        assert sol.for_budget(2, n).score == oracle_solve(d, 2, n).best_score


@given(small_datasets(max_features=8))
def test_halved_kernel_equals_full(d):
    if d.size == 0:
        return
    fq = build_counts(d)
    assert depth2_from_counts(fq, halved=True) == depth2_from_counts(fq, halved=False)


def test_witness_trees_have_claimed_scores():
    for seed in range(40):
        d = random_small_dataset(seed)
        sol = solve_depth2(d)
        X, y = d.feature_matrix(), d.labels()
        for t in (sol.best_one_node, sol.best_two_nodes, sol.best_three_nodes):
            if t.root < 0:
                continue
            score = 0
            for side, child in ((0, t.left), (1, t.right)):
                rows = X[:, t.root] == side
                if child < 0:
                    groups = [y[rows]]
                else:
                    groups = [y[rows & (X[:, child] == v)] for v in (0, 1)]
                    assert all(g.size for g in groups)
                for g in groups:
                    score += g.size - (np.bincount(g).max() if g.size else 0)
            assert score == t.score
