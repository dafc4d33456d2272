"""C4.5-style decision trees over categorical attributes, plus rule extraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .model import Dataset, Instance


@dataclass(frozen=True)
class TreeParams:
    min_leaf_support: int = 1
    max_depth: int | None = None  # None: number of attributes


@dataclass(frozen=True)
class Leaf:
    label: str
    support: int


@dataclass(frozen=True)
class Split:
    attribute: str
    children: dict[str, "Node"] = field(hash=False)
    majority: str
    support: int


Node = Union[Leaf, Split]


@dataclass(frozen=True)
class DecisionTree:
    root: Node
    attributes: tuple[str, ...]
    class_set: tuple[str, ...]


@dataclass(frozen=True)
class PredictionRule:
    antecedent: tuple[tuple[str, str], ...]
    consequent: str
    support: int

    def __str__(self) -> str:
        lhs = ", ".join(f"{a}={v}" for a, v in self.antecedent)
        return f"{lhs} => {self.consequent} (support={self.support})".lstrip()

    def matches(self, values: dict[str, str]) -> bool:
        return all(values.get(a) == v for a, v in self.antecedent)


def _entropy(counts: np.ndarray) -> float:
    """Base-2 entropy along the last axis of a count array."""
    counts = np.asarray(counts, dtype=float)
    tot = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(tot > 0, counts / tot, 0.0)
        terms = np.where(p > 0, -p * np.log2(p), 0.0)
    return terms.sum(axis=-1)


def _gain_ratio(col: np.ndarray, y: np.ndarray, n_values: int, n_classes: int) -> tuple[float, np.ndarray]:
    table = np.bincount(col * n_classes + y, minlength=n_values * n_classes).reshape(n_values, n_classes)
    sizes = table.sum(axis=1)
    n = sizes.sum()
    w = sizes / n
    gain = float(_entropy(table.sum(axis=0)) - (w * _entropy(table)).sum())
    split_info = float(_entropy(sizes))
    if split_info <= 0.0:
        return 0.0, sizes
    return gain / split_info, sizes


def gain_ratio(dataset: Dataset, attribute: str) -> float:
    """Information gain of a split on ``attribute`` over its split information."""
    if len(dataset) == 0:
        raise ValueError("gain ratio of an empty dataset is undefined")
    a = dataset.schema.index(attribute)
    return _gain_ratio(dataset.X[:, a], dataset.y, len(dataset.schema.domains[a]), dataset.schema.n_classes)[0]


def build_tree(dataset: Dataset, params: TreeParams = TreeParams()) -> DecisionTree:
    if len(dataset) == 0:
        raise ValueError("cannot grow a tree on an empty dataset")
    schema = dataset.schema
    X, y = dataset.X, dataset.y
    if (X < 0).any() or (y < 0).any():
        raise ValueError("training data has values outside the schema")
    k = schema.n_classes
    sizes = [len(d) for d in schema.domains]
    max_depth = schema.n_attributes if params.max_depth is None else params.max_depth
    min_leaf = params.min_leaf_support

    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    starts = offsets[:-1]
    Xoff = (X + starts[None, :]) * k
    n_cells = int(offsets[-1]) * k

    def grow(idx: np.ndarray, counts: list[int], available: tuple[int, ...], depth: int) -> Node:
        n = len(idx)
        majority = schema.class_set[counts.index(max(counts))]
        if (sum(c > 0 for c in counts) <= 1 or not available or depth >= max_depth
                or n < min_leaf):
            return Leaf(majority, n)
        cols = list(available)
        # one bincount gives the value x class table of every candidate attribute
        yy = y[idx]
        table = np.bincount((Xoff[np.ix_(idx, cols)] + yy[:, None]).ravel(),
                            minlength=n_cells).reshape(-1, k)
        vs = table.sum(axis=1)
        cond = np.add.reduceat(vs * _entropy(table), starts) / n
        p = vs / n
        with np.errstate(divide="ignore", invalid="ignore"):
            split_info = np.add.reduceat(np.where(p > 0, -p * np.log2(p), 0.0), starts)
        n_obs = np.add.reduceat(vs > 0, starts)
        smallest = np.minimum.reduceat(np.where(vs > 0, vs, n + 1), starts)
        gain = float(_entropy(np.asarray(counts))) - cond
        best, best_gr = None, -np.inf
        for a in cols:
            # constant attributes cannot separate anything here
            if n_obs[a] < 2 or smallest[a] < min_leaf:
                continue
            gr = gain[a] / split_info[a]
            if gr > best_gr + 1e-12:
                best, best_gr = a, gr
        if best is None:
            return Leaf(majority, n)
        rest = tuple(a for a in available if a != best)
        best_col = X[idx, best]
        sub = table[offsets[best]:offsets[best + 1]]
        children = {}
        for v in np.flatnonzero(sub.sum(axis=1)).tolist():
            children[schema.domains[best][v]] = grow(idx[best_col == v], sub[v].tolist(), rest, depth + 1)
        return Split(schema.attributes[best], children, majority, n)

    root = grow(np.arange(len(dataset)), np.bincount(y, minlength=k).tolist(),
                tuple(range(schema.n_attributes)), 0)
    return DecisionTree(root, schema.attributes, schema.class_set)


def predict_tree(tree: DecisionTree, instance: Instance | tuple | dict) -> str:
    """Walk the tree; a value without a child falls back to that node's majority class."""
    if isinstance(instance, Instance):
        instance = instance.values
    values = instance if isinstance(instance, dict) else dict(zip(tree.attributes, instance))
    node = tree.root
    while isinstance(node, Split):
        child = node.children.get(values.get(node.attribute))
        if child is None:
            return node.majority
        node = child
    return node.label


def predict_dataset(tree: DecisionTree, dataset: Dataset) -> np.ndarray:
    """Class codes predicted for every row of ``dataset`` (same schema as training)."""
    schema = dataset.schema
    X = dataset.X
    out = np.empty(len(dataset), dtype=np.int64)
    cidx = {c: i for i, c in enumerate(schema.class_set)}

    def walk(node: Node, idx: np.ndarray) -> None:
        if not len(idx):
            return
        if isinstance(node, Leaf):
            out[idx] = cidx[node.label]
            return
        a = schema.index(node.attribute)
        col = X[idx, a]
        handled = np.zeros(len(idx), dtype=bool)
        codes = schema._value_codes[a]
        for value, child in node.children.items():
            hit = col == codes[value]
            handled |= hit
            walk(child, idx[hit])
        out[idx[~handled]] = cidx[node.majority]

    walk(tree.root, np.arange(len(dataset)))
    return out


def extract_rules(tree: DecisionTree) -> list[PredictionRule]:
    rules: list[PredictionRule] = []

    def visit(node: Node, path: tuple[tuple[str, str], ...]) -> None:
        if isinstance(node, Leaf):
            rules.append(PredictionRule(path, node.label, node.support))
            return
        for value, child in node.children.items():
            visit(child, path + ((node.attribute, value),))

    visit(tree.root, ())
    return rules


def leaves(tree: DecisionTree) -> list[Leaf]:
    out = []

    def visit(node: Node) -> None:
        if isinstance(node, Leaf):
            out.append(node)
        else:
            for child in node.children.values():
                visit(child)

    visit(tree.root)
    return out


def depth(tree: DecisionTree) -> int:
    def d(node: Node) -> int:
        return 0 if isinstance(node, Leaf) else 1 + max(d(c) for c in node.children.values())
    return d(tree.root)


def dumps_rules(rules: list[PredictionRule]) -> str:
    return "".join(f"{r}\n" for r in rules)


def dumps_tree(tree: DecisionTree) -> str:
    """Indented rendering, one arc per line, leaves shown as ``: CLASS (support)``."""
    lines: list[str] = []

    def visit(node: Node, indent: int) -> None:
        for value, child in node.children.items():
            head = "|   " * indent + f"{node.attribute} = {value}"
            if isinstance(child, Leaf):
                lines.append(f"{head}: {child.label} ({child.support})")
            else:
                lines.append(head)
                visit(child, indent + 1)

    if isinstance(tree.root, Leaf):
        lines.append(f": {tree.root.label} ({tree.root.support})")
    else:
        visit(tree.root, 0)
    return "\n".join(lines) + "\n"


def write_rules(rules: list[PredictionRule], path: str | Path) -> None:
    Path(path).write_text(dumps_rules(rules), encoding="utf-8")


def write_tree(tree: DecisionTree, path: str | Path) -> None:
    Path(path).write_text(dumps_tree(tree), encoding="utf-8")
