import pytest

from dptree import InputError
from dptree.dataset import leaf_misclassification
from dptree.testing import oracle_solve, random_dataset, random_small_dataset, xor_dataset
from dptree.testing.oracle import witness_depth, witness_nodes

# values produced by the brute force itself and pinned as regression fixtures
FIXTURES = [
    ((2024, 30, 6, 2), 3, 7, (12, 12, 10, 9, 7, 7, 6, 5)),
    ((7, 30, 5, 3), 2, 3, (17, 16, 13, 12)),
]


@pytest.mark.parametrize("shape,d,n,scores", FIXTURES)
def test_pinned_scores(shape, d, n, scores):
    seed, size, f, c = shape
    res = oracle_solve(random_dataset(seed, n_instances=size, n_features=f, n_classes=c), d, n)
    assert res.scores_by_budget == scores
    assert res.best_score == scores[-1]


def test_xor():
    assert oracle_solve(xor_dataset(), 2, 3).best_score == 0
    assert oracle_solve(xor_dataset(), 2).scores_by_budget == (2, 2, 1, 0)


def test_zero_nodes_is_leaf():
    for seed in range(20):
        d = random_small_dataset(seed)
        assert oracle_solve(d, 3, 0).best_score == leaf_misclassification(d)


def test_witness_respects_budget():
    for seed in range(20):
        d = random_small_dataset(seed)
        res = oracle_solve(d, 3, 5)
        assert witness_nodes(res.witness) == res.best_node_count <= 5
        assert witness_depth(res.witness) <= 3


def test_sparse_helpers():
    res = oracle_solve(xor_dataset(), 2)
    assert res.best_sparse(0) == (0, 3)
    assert res.best_sparse(1) == (2, 0)
    assert res.best_sparse_score(1) == 2


def test_guards():
    with pytest.raises(InputError):
        oracle_solve(random_dataset(0, n_features=11), 2)
    with pytest.raises(InputError):
        oracle_solve(xor_dataset(), 4)
