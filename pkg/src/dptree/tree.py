"""Decision trees over binary features: left edge = feature absent, right edge = present."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class LeafNode:
    label: int

    def to_dict(self) -> dict:
        return {"class": int(self.label)}


@dataclass(frozen=True)
class PredicateNode:
    feature: int
    left: "Node"
    right: "Node"

    def to_dict(self) -> dict:
        return {"feature": int(self.feature), "left": self.left.to_dict(), "right": self.right.to_dict()}


Node = Union[LeafNode, PredicateNode]


def node_from_dict(obj: dict) -> Node:
    if "class" in obj:
        return LeafNode(int(obj["class"]))
    try:
        return PredicateNode(int(obj["feature"]), node_from_dict(obj["left"]), node_from_dict(obj["right"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed tree node: {obj!r}") from exc


class DecisionTree:
    """A tree plus the objective the solver reported for it."""

    def __init__(self, root: Node, objective: int | None = None):
        self.root = root
        self.objective = objective

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X)
        out = np.empty(X.shape[0], dtype=np.int64)
        idx = np.arange(X.shape[0])
        stack = [(self.root, idx)]
        while stack:
            node, rows = stack.pop()
            if isinstance(node, LeafNode):
                out[rows] = node.label
                continue
            has = X[rows, node.feature].astype(bool)
            stack.append((node.left, rows[~has]))
            stack.append((node.right, rows[has]))
        return out

    def misclassifications(self, X, y) -> int:
        return int(np.count_nonzero(self.predict(X) != np.asarray(y)))

    @property
    def depth(self) -> int:
        def rec(node):
            if isinstance(node, LeafNode):
                return 0
            return 1 + max(rec(node.left), rec(node.right))
        return rec(self.root)

    @property
    def num_nodes(self) -> int:
        """Number of feature (predicate) nodes."""
        def rec(node):
            if isinstance(node, LeafNode):
                return 0
            return 1 + rec(node.left) + rec(node.right)
        return rec(self.root)

    def paths(self):
        """Yield the list of (feature, present) tests leading to each leaf, with the leaf."""
        stack = [(self.root, [])]
        while stack:
            node, path = stack.pop()
            if isinstance(node, LeafNode):
                yield path, node
                continue
            stack.append((node.right, path + [(node.feature, True)]))
            stack.append((node.left, path + [(node.feature, False)]))

    def features_used(self) -> list[int]:
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, PredicateNode):
                out.append(node.feature)
                stack.extend((node.left, node.right))
        return sorted(set(out))

    def to_dict(self) -> dict:
        return self.root.to_dict()

    @classmethod
    def from_dict(cls, obj: dict, objective: int | None = None) -> "DecisionTree":
        return cls(node_from_dict(obj), objective)

    def to_text(self) -> str:
        lines = []

        def rec(node, indent, prefix):
            pad = "  " * indent
            if isinstance(node, LeafNode):
                lines.append(f"{pad}{prefix}class {node.label}")
                return
            lines.append(f"{pad}{prefix}feature {node.feature}")
            rec(node.left, indent + 1, "0: ")
            rec(node.right, indent + 1, "1: ")

        rec(self.root, 0, "")
        return "\n".join(lines)

    def map_features(self, mapping) -> "DecisionTree":
        """Relabel every feature index through ``mapping``."""
        def rec(node):
            if isinstance(node, LeafNode):
                return node
            return PredicateNode(int(mapping[node.feature]), rec(node.left), rec(node.right))
        return DecisionTree(rec(self.root), self.objective)

    def __repr__(self) -> str:
        return f"DecisionTree(objective={self.objective}, depth={self.depth}, nodes={self.num_nodes})"
