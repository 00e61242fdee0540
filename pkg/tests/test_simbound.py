from dptree.cache import OptimalRecord, make_cache
from dptree.dataset import Branch, Literal
from dptree.simbound import (SimilarityTracker, replace_dataset_for_similarity, similarity_lower_bound,
                             update_cache_using_similarity)
from dptree.solver import Solver, SolverOptions
from dptree.testing import oracle_score, random_dataset, random_small_dataset


def test_bound_arithmetic():
    assert similarity_lower_bound(12, 5) == 7
    assert similarity_lower_bound(3, 5) == 0
    assert similarity_lower_bound(4, 0) == 4


def test_empty_tracker_is_a_noop():
    d = random_dataset(0)
    cache = make_cache("dataset")
    assert update_cache_using_similarity(SimilarityTracker(), cache, d, d, 2, 3) is False
    assert len(cache) == 0


def test_equal_dataset_transfers_optimum():
    root = random_dataset(0, n_instances=30)
    old, new = root.subset(range(20)), root.subset(range(20))
    cache, tracker = make_cache("branch"), SimilarityTracker()
    k_old, k_new = Branch([Literal(0, True)]), Branch([Literal(1, True)])
    cache.store_optimal(k_old, 2, 3, OptimalRecord(-1, 0, 0, 5, 0))
    replace_dataset_for_similarity(tracker, old, 2, k_old)
    assert update_cache_using_similarity(tracker, cache, new, k_new, 2, 3) is True
    assert cache.retrieve_optimal(k_new, 2, 3).score == 5


def test_bound_from_shrunk_dataset():
    root = random_dataset(0, n_instances=30)
    old, new = root.subset(range(30)), root.subset(range(26))
    cache, tracker = make_cache("dataset"), SimilarityTracker()
    cache.store_optimal(old, 2, 3, OptimalRecord(-1, 0, 0, 10, 0))
    replace_dataset_for_similarity(tracker, old, 2, old)
    log = []
    assert update_cache_using_similarity(tracker, cache, new, new, 2, 3, log) is False
    assert cache.retrieve_lower_bound(new, 2, 3) == 6
    assert log == [("similarity", new, 2, 3, 6)]


def test_replacement_prefers_empty_then_nearest():
    root = random_dataset(1, n_instances=40)
    a, b, c = root.subset(range(10)), root.subset(range(20, 40)), root.subset(range(12))
    tracker = SimilarityTracker()
    replace_dataset_for_similarity(tracker, a, 3, "a")
    replace_dataset_for_similarity(tracker, b, 3, "b")
    assert [r[1] for r in tracker.records(3)] == ["a", "b"]
    replace_dataset_for_similarity(tracker, c, 3, "c")
    assert [r[1] for r in tracker.records(3)] == ["c", "b"]


def test_injected_bounds_are_sound():
    for seed in range(60):
        d = random_small_dataset(seed)
        s = Solver(d, SolverOptions(audit=True))
        for n in (7, 2, 5):
            s.solve(3, n)
        for kind, D, depth, nodes, bound in (e for e in s.audit_log if e[0] == "similarity"):
            assert bound <= oracle_score(D, depth, nodes)
