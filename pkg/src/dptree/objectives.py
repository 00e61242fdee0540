"""Query drivers on top of one :class:`~dptree.solver.Solver` session.

All drivers issue a sequence of budgeted solves against the same cache, so
results computed for one node budget are reused by the next.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass, field

from .dataset import BinaryDataset, leaf_misclassification
from .errors import ConfigError, InputError
from .solver import Solver, SolverOptions
from .tree import DecisionTree


@dataclass(frozen=True)
class SparseConfig:
    alpha: int
    max_depth: int
    max_nodes: int | None = None

    def __post_init__(self):
        if isinstance(self.alpha, bool) or not isinstance(self.alpha, numbers.Integral):
            if isinstance(self.alpha, numbers.Real) and float(self.alpha).is_integer():
                object.__setattr__(self, "alpha", int(self.alpha))
            else:
                raise ConfigError(f"sparse coefficient must be a non-negative integer, got {self.alpha!r}; "
                                  "scale the objective so the penalty becomes integral")
        if self.alpha < 0:
            raise ConfigError("sparse coefficient must be non-negative")
        if self.max_depth < 0 or (self.max_nodes is not None and self.max_nodes < 0):
            raise InputError("budgets must be non-negative")


@dataclass
class ObjectiveResult:
    tree: DecisionTree
    misclassifications: int
    nodes: int
    objective: int
    statistics: dict = field(default_factory=dict)


def _session(dataset: BinaryDataset, solver: Solver | None, options: SolverOptions | None) -> Solver:
    if solver is None:
        return Solver(dataset, options)
    if solver.dataset is not dataset:
        raise InputError("solver session belongs to a different dataset")
    return solver


def _node_cap(max_depth: int, max_nodes: int | None) -> int:
    cap = (1 << max_depth) - 1
    return cap if max_nodes is None else min(max_nodes, cap)


def solve_sparse(dataset: BinaryDataset, cfg: SparseConfig, solver: Solver | None = None,
                 options: SolverOptions | None = None) -> ObjectiveResult:
    """Minimise misclassifications + alpha * feature nodes."""
    session = _session(dataset, solver, options)
    alpha = cfg.alpha
    best_value = leaf_misclassification(dataset)
    best_budget = 0
    best_score, best_nodes = best_value, 0
    for n in range(1, _node_cap(cfg.max_depth, cfg.max_nodes) + 1):
        ub = best_value - alpha * n - 1
        res = session.solve(cfg.max_depth, n, upper_bound=ub, reconstruct=False)
        if res.objective is None:
            continue
        value = res.objective + alpha * res.nodes
        if value < best_value:
            best_value, best_budget = value, n
            best_score, best_nodes = res.objective, res.nodes
    tree = session.reconstruct(cfg.max_depth, best_budget)
    return ObjectiveResult(tree, best_score, best_nodes, best_value, session.statistics())


def solve_lexicographic(dataset: BinaryDataset, max_depth: int, max_nodes: int | None = None,
                        solver: Solver | None = None, options: SolverOptions | None = None) -> ObjectiveResult:
    """Fewest feature nodes among the trees with minimum misclassifications."""
    session = _session(dataset, solver, options)
    n = _node_cap(max_depth, max_nodes)
    first = session.solve(max_depth, n, reconstruct=False)
    ub = first.objective
    best_budget = n
    for k in range(n - 1, -1, -1):
        res = session.solve(max_depth, k, upper_bound=ub, reconstruct=False)
        if res.objective is not None:
            best_budget = k
    tree = session.reconstruct(max_depth, best_budget)
    return ObjectiveResult(tree, ub, tree.num_nodes, ub, session.statistics())


def solve_budget_sweep(dataset: BinaryDataset, max_depth: int, node_range=None, solver: Solver | None = None,
                       options: SolverOptions | None = None) -> list[tuple[int, int]]:
    """``(n, optimal score)`` for each node budget, ascending, in one session."""
    session = _session(dataset, solver, options)
    if node_range is None:
        node_range = range(1, (1 << max_depth))
    out = []
    for n in sorted(node_range):
        res = session.solve(max_depth, n, reconstruct=False)
        out.append((n, res.objective))
    return out
