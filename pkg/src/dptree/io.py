"""Reading and writing binary datasets.

Two text formats are understood:

``dl-space``
    one instance per line, whitespace separated integers, class label first
    and then one 0/1 token per feature.
``csv``
    comma separated, a header row (ignored), features first and the label in
    the last column.

Instance ids follow file order starting at 0.  The class count is the largest
label plus one.
"""
from __future__ import annotations

import csv
import os

import numpy as np

from .dataset import BinaryDataset
from .errors import InputError, ParseError
from .tree import DecisionTree, LeafNode, PredicateNode

FORMATS = ("auto", "dl-space", "csv")


def detect_format(path: str) -> str:
    if path.lower().endswith(".csv"):
        return "csv"
    with open(path) as fh:
        for line in fh:
            if line.strip():
                return "csv" if "," in line else "dl-space"
    return "dl-space"


def _parse_int(token: str, line: int, column: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", line, column) from None


def _rows_dl_space(path: str):
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if tokens:
                yield lineno, tokens[0], tokens[1:], 1


def _rows_csv(path: str):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1:
                continue
            row = [tok.strip() for tok in row]
            if not any(row):
                continue
            yield lineno, row[-1], row[:-1], 0


def parse_rows(rows) -> tuple[np.ndarray, np.ndarray]:
    """Validate ``(line, label token, feature tokens, first feature column offset)`` rows."""
    X, y = [], []
    width = None
    for lineno, label_tok, feats, first_col in rows:
        label_col = 1 if first_col else len(feats) + 1
        label = _parse_int(label_tok, lineno, label_col)
        if label < 0:
            raise ParseError(f"class label must be non-negative, got {label}", lineno, label_col)
        if width is None:
            width = len(feats)
        elif len(feats) != width:
            raise ParseError(f"expected {width} features, found {len(feats)}", lineno)
        values = []
        for k, tok in enumerate(feats):
            col = k + 1 + first_col
            v = _parse_int(tok, lineno, col)
            if v not in (0, 1):
                raise ParseError(f"feature values must be 0 or 1, got {v}", lineno, col)
            values.append(v)
        X.append(values)
        y.append(label)
    if not y:
        raise InputError("dataset file contains no instances")
    return np.array(X, dtype=np.uint8).reshape(len(y), width), np.array(y, dtype=np.int64)


def read_arrays(path: str, fmt: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    if fmt not in FORMATS:
        raise InputError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    if not os.path.exists(path):
        raise InputError(f"no such file: {path}")
    if fmt == "auto":
        fmt = detect_format(path)
    rows = _rows_csv(path) if fmt == "csv" else _rows_dl_space(path)
    return parse_rows(rows)


def ingest(path: str, fmt: str = "auto") -> BinaryDataset:
    X, y = read_arrays(path, fmt)
    return BinaryDataset.from_arrays(X, y)


def emit(dataset: BinaryDataset, path: str, fmt: str = "dl-space") -> None:
    """Write instances in id order."""
    X = dataset.table.features
    y = dataset.table.labels
    order = np.sort(dataset.ids)
    with open(path, "w", newline="") as fh:
        if fmt == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"f{i}" for i in range(X.shape[1])] + ["label"])
            for i in order:
                w.writerow(list(X[i].tolist()) + [int(y[i])])
        elif fmt == "dl-space":
            for i in order:
                fh.write(" ".join(str(v) for v in [int(y[i])] + X[i].tolist()) + "\n")
        else:
            raise InputError(f"cannot write format {fmt!r}")


def invert_dense_features(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flip every column that is 1 in more than half of the rows; returns (X', mask)."""
    X = np.asarray(X, dtype=np.uint8)
    mask = X.mean(axis=0) > 0.5 if X.shape[0] else np.zeros(X.shape[1], dtype=bool)
    out = X.copy()
    out[:, mask] = 1 - out[:, mask]
    return out, mask


def uninvert_tree(tree: DecisionTree, mask: np.ndarray) -> DecisionTree:
    """Express a tree learnt on inverted columns in terms of the original columns."""
    def rec(node):
        if isinstance(node, LeafNode):
            return node
        left, right = rec(node.left), rec(node.right)
        if mask[node.feature]:
            left, right = right, left
        return PredicateNode(node.feature, left, right)
    return DecisionTree(rec(tree.root), tree.objective)
