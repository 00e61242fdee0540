"""Optimal decision trees over binary features by dynamic programming and search."""
from .dataset import BinaryDataset, Branch, Instance, Literal, split, split_on_feature
from .errors import ConfigError, InputError, InternalError, ParseError, SolverTimeout
from .solver import Solver, SolverOptions, SolveResult, solve
from .tree import DecisionTree, LeafNode, PredicateNode

__version__ = "0.1.0"

__all__ = [
    "BinaryDataset", "Branch", "Instance", "Literal", "split", "split_on_feature",
    "Solver", "SolverOptions", "SolveResult", "solve",
    "DecisionTree", "LeafNode", "PredicateNode",
    "ConfigError", "InputError", "InternalError", "ParseError", "SolverTimeout",
]
