"""Search for optimal classification trees under depth and feature-node budgets.

The recursion keys every subproblem by its dataset (or by the branch leading to
it), memoises optimal roots and lower bounds, hands depth <= 2 subproblems to
the frequency-counter solver and prunes with upper bounds passed down the tree.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .cache import OptimalRecord, make_cache
from .dataset import BinaryDataset, Branch, majority_class, split_on_feature
from .depth2 import Depth2Tree, depth2_from_counts
from .errors import ConfigError, InputError, InternalError, SolverTimeout
from .freqcount import CounterStore, choose_counter_and_refresh, refresh_with_sibling
from .simbound import SimilarityTracker, replace_dataset_for_similarity, update_cache_using_similarity
from .tree import DecisionTree, LeafNode, PredicateNode

INFEASIBLE = float("inf")

CACHE_KINDS = ("dataset", "branch")
FEATURE_ORDERS = ("in-order", "gini", "random")
NODE_ORDERS = ("dynamic", "post-order")


@dataclass
class SolverOptions:
    cache_kind: str = "dataset"
    feature_order: str = "in-order"
    seed: int = 0
    node_order: str = "dynamic"
    similarity_bound: bool = True
    incremental_frequency: bool = True
    use_depth2: bool = True
    lookup_buffer: bool = True
    time_limit: float | None = None
    audit: bool = False

    def __post_init__(self):
        if self.cache_kind not in CACHE_KINDS:
            raise ConfigError(f"unknown cache kind {self.cache_kind!r}; choose from {', '.join(CACHE_KINDS)}")
        order = self.feature_order
        if order.startswith("random:"):
            try:
                self.seed = int(order.split(":", 1)[1])
            except ValueError as exc:
                raise ConfigError(f"bad random seed in feature order {order!r}") from exc
            self.feature_order = order = "random"
        if order not in FEATURE_ORDERS:
            raise ConfigError(f"unknown feature order {order!r}; choose from {', '.join(FEATURE_ORDERS)}")
        if self.node_order not in NODE_ORDERS:
            raise ConfigError(f"unknown node order {self.node_order!r}; choose from {', '.join(NODE_ORDERS)}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ConfigError("time limit must be positive")


@dataclass
class SolveResult:
    tree: DecisionTree | None
    objective: int | None
    statistics: dict = field(default_factory=dict)
    nodes: int | None = None

    @property
    def feasible(self) -> bool:
        return self.objective is not None


def gini_feature_order(d: BinaryDataset) -> np.ndarray:
    """Features sorted by the instance-weighted Gini impurity of their split, ascending (stable)."""
    X = d.feature_matrix().astype(np.int64)
    y = d.labels()
    total = X.shape[0]
    if total == 0:
        return np.arange(d.n_features)
    present = np.stack([X[y == c].sum(axis=0) for c in range(d.n_classes)])  # (C, F)
    absent = np.asarray(d.class_sizes, dtype=np.int64)[:, None] - present
    score = np.zeros(d.n_features)
    for side in (present, absent):
        size = side.sum(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            p = np.where(size > 0, side / np.maximum(size, 1), 0.0)
        score += size / total * (1.0 - (p ** 2).sum(axis=0))
    return np.argsort(score, kind="stable")


def order_features(d: BinaryDataset, strategy: str = "in-order", seed: int = 0) -> np.ndarray:
    if strategy.startswith("random:"):
        strategy, seed = "random", int(strategy.split(":", 1)[1])
    if strategy == "in-order":
        return np.arange(d.n_features)
    if strategy == "gini":
        return gini_feature_order(d)
    if strategy == "random":
        return np.random.default_rng(seed).permutation(d.n_features)
    raise ConfigError(f"unknown feature order {strategy!r}; choose from {', '.join(FEATURE_ORDERS)}")


def order_children(leaf_left: int, leaf_right: int, node_order: str = "dynamic") -> bool:
    """True when the left (feature absent) child should be solved first."""
    if node_order == "post-order":
        return True
    return leaf_left > leaf_right


def _leaf_score(d: BinaryDataset) -> int:
    sizes = d.class_sizes
    return sum(sizes) - max(sizes)


def _record_from_depth2(t: Depth2Tree) -> OptimalRecord:
    if t.root < 0:
        return OptimalRecord.leaf(t.score)
    return OptimalRecord(t.root, int(t.left >= 0), int(t.right >= 0), t.score, t.depth)


class Solver:
    """One search session over a root dataset; the cache survives across :meth:`solve` calls."""

    def __init__(self, dataset: BinaryDataset, options: SolverOptions | None = None):
        self.dataset = dataset
        self.options = options = options or SolverOptions()
        self.cache = make_cache(options.cache_kind, options.lookup_buffer)
        self.counters = CounterStore(dataset.n_classes, dataset.n_features, options.incremental_frequency)
        self.tracker = SimilarityTracker() if options.similarity_bound else None
        self.features = [int(f) for f in order_features(dataset, options.feature_order, options.seed)]
        self.audit_log: list | None = [] if options.audit else None
        self._by_branch = options.cache_kind == "branch"
        self._dynamic = options.node_order == "dynamic"
        self._deadline = None
        self._family = None  # (parent, left, right) while a depth-3 node explores its splits
        self.stats = {
            "general_case_calls": 0,
            "depth2_calls": 0,
            "cache_hits": 0,
            "lower_bound_prunes": 0,
            "similarity_prunes": 0,
            "solve_seconds": 0.0,
            "reconstruct_seconds": 0.0,
        }

    # -- public -------------------------------------------------------------

    def solve(self, max_depth: int, max_nodes: int | None = None, upper_bound: int | None = None,
              reconstruct: bool = True) -> SolveResult:
        """Optimal tree within the budgets; infeasible (objective None) only if ``upper_bound`` is too tight."""
        if max_depth < 0:
            raise InputError("max_depth must be non-negative")
        if max_nodes is None:
            max_nodes = (1 << max_depth) - 1
        if max_nodes < 0:
            raise InputError("max_nodes must be non-negative")
        root = self.dataset
        if upper_bound is None:
            upper_bound = _leaf_score(root)
        if root.n_features == 0:
            max_depth = 0
        start = time.perf_counter()
        limit = self.options.time_limit
        self._deadline = start + limit if limit is not None else None
        try:
            rec = self._solve(root, Branch(), max_depth, max_nodes, upper_bound)
        except SolverTimeout as exc:
            self.stats["solve_seconds"] += time.perf_counter() - start
            exc.statistics = self.statistics()
            raise
        finally:
            self._deadline = None
        self.stats["solve_seconds"] += time.perf_counter() - start
        if rec is None:
            return SolveResult(None, None, self.statistics())
        tree = None
        if reconstruct:
            t0 = time.perf_counter()
            tree = self.reconstruct(max_depth, max_nodes)
            self.stats["reconstruct_seconds"] += time.perf_counter() - t0
            replay = tree.misclassifications(root.feature_matrix(), root.labels())
            if replay != rec.score:
                raise InternalError(f"reconstructed tree scores {replay}, solver reported {rec.score}")
        return SolveResult(tree, rec.score, self.statistics(), rec.nodes)

    def statistics(self) -> dict:
        out = dict(self.stats)
        cache_stats = self.cache.statistics()
        out["cache_entries"] = cache_stats["entries"]
        out["cache_keys"] = cache_stats["keys"]
        out["cache_entries_per_table"] = cache_stats["entries_per_table"]
        out["buffer_hits"] = cache_stats["buffer_hits"]
        out["scratch_counter_builds"] = self.counters.scratch_builds
        out["incremental_counter_builds"] = self.counters.incremental_builds
        out["derived_counter_builds"] = self.counters.derived_builds
        out["similarity_bounds"] = self.tracker.bounds_injected if self.tracker else 0
        out["similarity_transfers"] = self.tracker.transfers if self.tracker else 0
        return out

    def reconstruct(self, max_depth: int, max_nodes: int | None = None) -> DecisionTree:
        if max_nodes is None:
            max_nodes = (1 << max_depth) - 1
        d, n = self._normalize(max_depth, max_nodes)
        root = self._reconstruct(self.dataset, Branch(), d, n)
        score = self._expected_score(self.dataset, Branch(), d, n)
        return DecisionTree(root, score)

    # -- recursion ------------------------------------------------------------

    @staticmethod
    def _normalize(d: int, n: int) -> tuple[int, int]:
        if d < 62 and n > (1 << d) - 1:
            n = (1 << d) - 1
        if d > n:
            d = n
        return d, n

    def _key(self, d: BinaryDataset, branch):
        return branch if self._by_branch else d

    def _child_lb(self, d: BinaryDataset, branch, depth: int, nodes: int) -> int:
        if depth == 0 or nodes == 0:
            return _leaf_score(d)
        return self.cache.retrieve_lower_bound(self._key(d, branch), depth, nodes)

    def _solve(self, D: BinaryDataset, branch, d: int, n: int, UB) -> OptimalRecord | None:
        if UB < 0:
            return None
        d, n = self._normalize(d, n)
        leaf = _leaf_score(D)
        if d == 0 or D.size == 0:
            return OptimalRecord.leaf(leaf) if leaf <= UB else None
        cache = self.cache
        key = branch if self._by_branch else D
        rec = cache.retrieve_optimal(key, d, n)
        if rec is not None:
            self.stats["cache_hits"] += 1
            return rec if rec.score <= UB else None
        tracker = self.tracker
        if tracker is not None:
            tracker.last_bound = 0
            if update_cache_using_similarity(tracker, cache, D, key, d, n, self.audit_log):
                rec = cache.retrieve_optimal(key, d, n)
                return rec if rec.score <= UB else None
        LB = cache.retrieve_lower_bound(key, d, n)
        if self.audit_log is not None:
            self.audit_log.append(("retrieved", D, d, n, LB))
        if LB > UB:
            self.stats["lower_bound_prunes"] += 1
            if tracker is not None and 0 < tracker.last_bound == LB:
                self.stats["similarity_prunes"] += 1
            return None
        if LB == leaf:
            rec = OptimalRecord.leaf(leaf)
            cache.store_optimal(key, d, n, rec)
            return rec
        if d <= 2 and self.options.use_depth2:
            return self._depth2(D, key, d, n, UB)
        return self._general(D, branch, key, d, n, UB, LB)

    def _depth2(self, D: BinaryDataset, key, d: int, n: int, UB) -> OptimalRecord | None:
        self.stats["depth2_calls"] += 1
        family = self._family
        if family is not None and (D is family[1] or D is family[2]):
            sibling = family[2] if D is family[1] else family[1]
            fq = refresh_with_sibling(self.counters, D, family[0], sibling)
        else:
            fq = choose_counter_and_refresh(self.counters, D)
        sol = depth2_from_counts(fq)
        cache = self.cache
        cache.store_optimal(key, 1, 1, _record_from_depth2(sol.best_one_node))
        cache.store_optimal(key, 2, 2, _record_from_depth2(sol.best_two_nodes))
        cache.store_optimal(key, 2, 3, _record_from_depth2(sol.best_three_nodes))
        if self.tracker is not None:
            replace_dataset_for_similarity(self.tracker, D, d, key)
        rec = _record_from_depth2(sol.for_budget(d, n))
        return rec if rec.score <= UB else None

    def _general(self, D: BinaryDataset, branch, key, d: int, n: int, UB, LB: int) -> OptimalRecord | None:
        self.stats["general_case_calls"] += 1
        leaf = _leaf_score(D)
        if leaf <= UB:
            best, best_score = OptimalRecord.leaf(leaf), leaf
        else:
            best, best_score = None, INFEASIBLE
        rlb = INFEASIBLE
        n_max = min((1 << (d - 1)) - 1, n - 1)
        n_min = n - 1 - n_max
        deadline = self._deadline
        by_branch = self._by_branch
        track_family = d == 3 and self.options.use_depth2
        for f in self.features:
            if best_score == LB:
                break
            if deadline is not None and time.perf_counter() > deadline:
                raise SolverTimeout("time limit reached", self.statistics())
            left, right = split_on_feature(D, f)
            if left.size == 0 or right.size == 0:
                continue
            if by_branch:
                b_left, b_right = branch.child(f, False), branch.child(f, True)
            else:
                b_left = b_right = None
            if track_family:
                self._family = (D, left, right)
            left_first = order_children(_leaf_score(left), _leaf_score(right),
                                        "dynamic" if self._dynamic else "post-order")
            for n_left in range(n_min, n_max + 1):
                n_right = n - 1 - n_left
                ub = min(UB, best_score - 1)
                rec, lb_local = self._given_root(left, right, b_left, b_right, f, d,
                                                 n_left, n_right, ub, left_first)
                if rec is not None:
                    best, best_score = rec, rec.score
                elif lb_local < rlb:
                    rlb = lb_local
        self._family = None
        if best is not None:
            self.cache.store_optimal(key, d, n, best)
        else:
            bound = max(LB, UB + 1)
            if rlb != INFEASIBLE:
                bound = max(bound, rlb)
            self.cache.store_lower_bound(key, d, n, bound)
            if self.audit_log is not None:
                self.audit_log.append(("refined", D, d, n, bound))
        if self.tracker is not None:
            replace_dataset_for_similarity(self.tracker, D, d, key)
        return best

    def _given_root(self, left, right, b_left, b_right, f: int, d: int, n_left: int, n_right: int,
                    UB, left_first: bool) -> tuple[OptimalRecord | None, int]:
        d_left = min(d - 1, n_left)
        d_right = min(d - 1, n_right)
        if left_first:
            sides = ((left, b_left, d_left, n_left), (right, b_right, d_right, n_right))
        else:
            sides = ((right, b_right, d_right, n_right), (left, b_left, d_left, n_left))
        first, second = sides
        rec1 = self._solve(first[0], first[1], first[2], first[3], UB - self._child_lb(*second))
        rec2 = None
        if rec1 is not None:
            rec2 = self._solve(second[0], second[1], second[2], second[3], UB - rec1.score)
        if rec2 is None:
            lb_local = self._child_lb(left, b_left, d_left, n_left) + self._child_lb(right, b_right, d_right, n_right)
            if self.audit_log is not None:
                self.audit_log.append(("local", ((left, d_left, n_left), (right, d_right, n_right)), lb_local))
            return None, lb_local
        rec_left, rec_right = (rec1, rec2) if left_first else (rec2, rec1)
        return OptimalRecord(f, rec_left.nodes, rec_right.nodes, rec1.score + rec2.score,
                             1 + max(rec_left.depth, rec_right.depth)), rec1.score + rec2.score

    # -- reconstruction -------------------------------------------------------

    def _expected_score(self, D, branch, d, n) -> int:
        if d == 0 or D.size == 0:
            return _leaf_score(D)
        rec = self.cache.retrieve_optimal(self._key(D, branch), d, n)
        if rec is None:
            raise InternalError(f"no cached optimum for budget ({d}, {n}) during reconstruction")
        return rec.score

    def _reconstruct(self, D: BinaryDataset, branch, d: int, n: int):
        d, n = self._normalize(d, n)
        if d == 0 or D.size == 0:
            return LeafNode(majority_class(D) if D.size else 0)
        if d <= 2 and self.options.use_depth2:
            sol = depth2_from_counts(choose_counter_and_refresh(self.counters, D))
            return self._from_depth2(D, sol.for_budget(d, n))
        rec = self.cache.retrieve_optimal(self._key(D, branch), d, n)
        if rec is None:
            raise InternalError(f"no cached optimum for budget ({d}, {n}) during reconstruction")
        if rec.feature < 0:
            return LeafNode(majority_class(D))
        f = rec.feature
        left, right = split_on_feature(D, f)
        b_left = branch.child(f, False) if self._by_branch else None
        b_right = branch.child(f, True) if self._by_branch else None
        return PredicateNode(f,
                             self._reconstruct(left, b_left, min(d - 1, rec.left_nodes), rec.left_nodes),
                             self._reconstruct(right, b_right, min(d - 1, rec.right_nodes), rec.right_nodes))

    @staticmethod
    def _from_depth2(D: BinaryDataset, t: Depth2Tree):
        if t.root < 0:
            return LeafNode(majority_class(D))
        left, right = split_on_feature(D, t.root)

        def side(part, child):
            if child < 0:
                return LeafNode(majority_class(part))
            a, b = split_on_feature(part, child)
            return PredicateNode(child, LeafNode(majority_class(a)), LeafNode(majority_class(b)))

        return PredicateNode(t.root, side(left, t.left), side(right, t.right))


def solve(dataset: BinaryDataset, max_depth: int, max_nodes: int | None = None,
          options: SolverOptions | None = None) -> SolveResult:
    """One-shot solve; see :class:`Solver` to reuse the cache across budgets."""
    return Solver(dataset, options).solve(max_depth, max_nodes)
