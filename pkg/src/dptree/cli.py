"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 unreadable or malformed input,
4 time limit reached (partial statistics are still printed), 5 internal error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time

import numpy as np

from . import __version__
from .dataset import BinaryDataset
from .errors import ConfigError, InputError, InternalError, SolverTimeout
from .io import FORMATS, invert_dense_features, read_arrays, uninvert_tree
from .objectives import SparseConfig, solve_budget_sweep, solve_lexicographic, solve_sparse
from .solver import CACHE_KINDS, NODE_ORDERS, Solver, SolverOptions

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_TIMEOUT, EXIT_INTERNAL = 0, 2, 3, 4, 5

log = logging.getLogger("dptree")


def _common(p: argparse.ArgumentParser, budgets: bool = True) -> None:
    p.add_argument("input", help="dataset file")
    p.add_argument("--format", choices=FORMATS, default="auto")
    if budgets:
        p.add_argument("--max-depth", type=int, required=True)
        p.add_argument("--max-num-nodes", "--max-nodes", dest="max_nodes", type=int, default=None)
    p.add_argument("--cache-kind", choices=CACHE_KINDS, default="dataset")
    p.add_argument("--feature-order", default="in-order", help="in-order, gini or random[:SEED]")
    p.add_argument("--node-order", choices=NODE_ORDERS, default="dynamic")
    p.add_argument("--no-similarity-bound", action="store_true")
    p.add_argument("--no-incremental-frequency", action="store_true")
    p.add_argument("--time", type=float, default=None, help="wall-clock limit in seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.add_argument("--invert-dense-features", action="store_true",
                   help="flip columns that are mostly 1 before solving; trees are reported on original columns")
    p.add_argument("--verbose", "-v", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dptree", description="Optimal classification trees on binary data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{solve,sparse,lex,sweep,tune}")

    p = sub.add_parser("solve", help="minimum misclassification tree within depth and node budgets")
    _common(p)
    p = sub.add_parser("sparse", help="minimise misclassifications + coefficient * feature nodes")
    _common(p)
    p.add_argument("--sparse-coefficient", type=float, required=True)
    p = sub.add_parser("lex", help="fewest nodes among the minimum misclassification trees")
    _common(p)
    p = sub.add_parser("sweep", help="optimal score for every node budget 1..max")
    _common(p)
    p = sub.add_parser("tune", help="pick depth and node budget by stratified cross-validation")
    _common(p, budgets=False)
    p.add_argument("--max-depth", type=int, default=4, help="grid covers depths 1..max")
    p.add_argument("--folds", type=int, default=5)
    # hidden: brute-force reference scores for fixture generation
    p = sub.add_parser("oracle")
    p.add_argument("input")
    p.add_argument("--format", choices=FORMATS, default="auto")
    p.add_argument("--max-depth", type=int, required=True)
    p.add_argument("--max-num-nodes", "--max-nodes", dest="max_nodes", type=int, default=None)
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.add_argument("--verbose", "-v", action="store_true")
    return parser


def _options(args) -> SolverOptions:
    return SolverOptions(cache_kind=args.cache_kind, feature_order=args.feature_order, seed=args.seed,
                         node_order=args.node_order, similarity_bound=not args.no_similarity_bound,
                         incremental_frequency=not args.no_incremental_frequency, time_limit=args.time)


def _load(args) -> tuple[BinaryDataset, np.ndarray | None]:
    X, y = read_arrays(args.input, args.format)
    mask = None
    if getattr(args, "invert_dense_features", False):
        X, mask = invert_dense_features(X)
    return BinaryDataset.from_arrays(X, y), mask


def _check_budgets(args) -> None:
    if args.max_depth < 0:
        raise ConfigError("--max-depth must be non-negative")
    if getattr(args, "max_nodes", None) is not None and args.max_nodes < 0:
        raise ConfigError("--max-num-nodes must be non-negative")
    if getattr(args, "time", None) is not None and args.time <= 0:
        raise ConfigError("--time must be positive")


def _tree_block(tree, mask) -> dict:
    if mask is not None:
        tree = uninvert_tree(tree, mask)
    return {"tree": tree.to_dict(), "tree_text": tree.to_text(), "depth": tree.depth, "nodes": tree.num_nodes}


def _replay(dataset: BinaryDataset, tree, objective: int) -> None:
    replay = tree.misclassifications(dataset.feature_matrix(), dataset.labels())
    if replay != objective:
        raise InternalError(f"emitted tree misclassifies {replay} instances, report says {objective}")


def run(args) -> dict:
    """Execute one parsed command and return its report."""
    _check_budgets(args)
    start = time.perf_counter()
    if args.command == "oracle":
        from .testing.oracle import oracle_solve
        X, y = read_arrays(args.input, args.format)
        res = oracle_solve(BinaryDataset.from_arrays(X, y), args.max_depth, args.max_nodes)
        return {"command": "oracle", "objective": res.best_score, "nodes": res.best_node_count,
                "scores_by_budget": list(res.scores_by_budget)}
    dataset, mask = _load(args)
    options = _options(args)
    log.info("loaded %d instances, %d features, %d classes", dataset.size, dataset.n_features, dataset.n_classes)
    report: dict = {"command": args.command, "instances": dataset.size, "features": dataset.n_features}
    if mask is not None:
        report["inverted_features"] = np.flatnonzero(mask).tolist()

    if args.command == "tune":
        from .tuning import default_grid, tune
        res = tune(dataset, default_grid(args.max_depth), k=args.folds, seed=args.seed, options=options)
        report.update({"best_depth": res.best_depth, "best_nodes": res.best_nodes, "tie_break": res.tie_break,
                       "table": res.table, "objective": res.tree.objective})
        report.update(_tree_block(res.tree, mask))
        _replay(dataset, res.tree, res.tree.objective)
    else:
        solver = Solver(dataset, options)
        report["max_depth"] = args.max_depth
        report["max_nodes"] = args.max_nodes
        try:
            if args.command == "solve":
                res = solver.solve(args.max_depth, args.max_nodes)
                tree, objective = res.tree, res.objective
            elif args.command == "sparse":
                cfg = SparseConfig(args.sparse_coefficient, args.max_depth, args.max_nodes)
                res = solve_sparse(dataset, cfg, solver=solver)
                tree, objective = res.tree, res.misclassifications
                report["sparse_coefficient"] = cfg.alpha
                report["sparse_objective"] = res.objective
            elif args.command == "lex":
                res = solve_lexicographic(dataset, args.max_depth, args.max_nodes, solver=solver)
                tree, objective = res.tree, res.misclassifications
            else:
                cap = (1 << args.max_depth) - 1
                if args.max_nodes is not None:
                    cap = min(cap, args.max_nodes)
                rows = solve_budget_sweep(dataset, args.max_depth, range(1, cap + 1), solver=solver)
                report["sweep"] = [{"nodes": n, "objective": s} for n, s in rows]
                tree, objective = None, (rows[-1][1] if rows else None)
        except SolverTimeout as exc:
            exc.statistics = solver.statistics()
            raise
        report["objective"] = objective
        if tree is not None:
            _replay(dataset, tree, objective)
            report["accuracy"] = (dataset.size - objective) / dataset.size
            report.update(_tree_block(tree, mask))
        stats = solver.statistics()
        report["cache_entries"] = stats["cache_entries"]
        report["statistics"] = stats
    report["runtime_seconds"] = time.perf_counter() - start
    return report


def _text(report: dict) -> str:
    lines = [f"{k}: {report[k]}" for k in ("command", "instances", "features", "objective", "accuracy",
                                             "sparse_objective", "best_depth", "best_nodes", "cache_entries")
             if k in report]
    if "sweep" in report:
        lines += [f"  nodes={r['nodes']} objective={r['objective']}" for r in report["sweep"]]
    if "table" in report:
        lines += [f"  depth={r['depth']} nodes={r['nodes']} train={r['train_accuracy']:.4f} "
                  f"test={r['test_accuracy']:.4f}" for r in report["table"]]
    if "scores_by_budget" in report:
        lines.append(f"scores_by_budget: {report['scores_by_budget']}")
    if "tree_text" in report:
        lines.append(report["tree_text"])
    if "runtime_seconds" in report:
        lines.append(f"runtime_seconds: {report['runtime_seconds']:.3f}")
    return "\n".join(lines)


def _emit(report: dict, fmt: str) -> None:
    if fmt == "text":
        print(_text(report))
    else:
        print(json.dumps({k: v for k, v in report.items() if k != "tree_text"}, indent=2, default=int))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    fmt = getattr(args, "output", "json")
    try:
        report = run(args)
    except ConfigError as exc:
        print(f"dptree: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, OSError) as exc:
        print(f"dptree: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverTimeout as exc:
        print(f"dptree: {exc}", file=sys.stderr)
        _emit({"command": args.command, "status": "timeout", "statistics": exc.statistics or {}}, fmt)
        return EXIT_TIMEOUT
    except InternalError as exc:
        print(f"dptree: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(report, fmt)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
