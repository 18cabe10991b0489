"""Axis-aligned threshold decision trees with traceable decisions.

Trees are grown by greedy recursive partitioning: every node searches
all (feature, threshold) pairs -- thresholds are midpoints between
consecutive sorted distinct values -- and keeps the split with the
lowest weighted Gini impurity of the children.  A split is accepted as
long as it does not worsen impurity; a node becomes a leaf on purity,
at max_depth, when no candidate respects min_leaf_size, or when every
candidate would increase impurity.  Leaves carry the (weighted)
majority label, ties going to +1.

The left branch always means "value <= threshold"; instance weights
are supported so boosted stumps can reuse the same search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import DecisionFunction, as_matrix, sign_labels
from .data import LabeledDataset

_EPS = 1e-12


@dataclass(frozen=True)
class TreeNode:
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    label: int = 1
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass(frozen=True)
class DecisionTree(DecisionFunction):
    root: TreeNode
    dim: int
    max_depth: int
    min_leaf_size: int

    def decision_function(self, X):
        X = as_matrix(X, self.dim)
        out = np.empty(X.shape[0], dtype=int)

        def walk(node, idx):
            if idx.size == 0:
                return
            if node.is_leaf:
                out[idx] = node.label
                return
            mask = X[idx, node.feature] <= node.threshold
            walk(node.left, idx[mask])
            walk(node.right, idx[~mask])

        walk(self.root, np.arange(X.shape[0]))
        return out

    def depth(self) -> int:
        def walk(node):
            if node.is_leaf:
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)

    def render(self) -> str:
        """Plain-text dump, one node per line, two spaces per level."""
        lines = []

        def walk(node, indent):
            pad = "  " * indent
            if node.is_leaf:
                lines.append(f"{pad}leaf: {node.label:+d}")
            else:
                lines.append(f"{pad}f{node.feature} <= {node.threshold!r}")
                walk(node.left, indent + 1)
                walk(node.right, indent + 1)

        walk(self.root, 0)
        return "\n".join(lines) + "\n"


def _gini(w_pos, w_neg):
    total = w_pos + w_neg
    if total <= 0.0:
        return 0.0
    p = w_pos / total
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _majority(w_pos, w_neg):
    return 1 if w_pos >= w_neg else -1


def _gini_vec(w_pos, w_neg):
    total = w_pos + w_neg
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(total > 0.0, w_pos / np.where(total > 0.0, total, 1.0), 0.0)
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _best_split(X, y, w, min_leaf_size):
    """Lowest-weighted-Gini (feature, threshold), ties to the lower pair."""
    n = X.shape[0]
    total_pos = float(w[y == 1].sum())
    total_neg = float(w[y == -1].sum())
    total = total_pos + total_neg
    if total <= 0.0 or n < 2:
        return None
    positions = np.arange(1, n)  # left side takes the first `positions` points
    best = None  # (impurity, feature, threshold)
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        ys = y[order]
        ws = w[order]
        valid = (
            (xs[:-1] != xs[1:])
            & (positions >= min_leaf_size)
            & (n - positions >= min_leaf_size)
        )
        if not valid.any():
            continue
        lp = np.cumsum(np.where(ys == 1, ws, 0.0))[:-1]
        ln_ = np.cumsum(np.where(ys == -1, ws, 0.0))[:-1]
        rp, rn = total_pos - lp, total_neg - ln_
        impurity = ((lp + ln_) * _gini_vec(lp, ln_) + (rp + rn) * _gini_vec(rp, rn)) / total
        impurity[~valid] = np.inf
        i = int(np.argmin(impurity))  # first minimum = lowest threshold
        if best is None or impurity[i] < best[0]:
            best = (float(impurity[i]), j, 0.5 * (xs[i] + xs[i + 1]))
    return best


def _grow(X, y, w, depth, max_depth, min_leaf_size):
    w_pos = float(w[y == 1].sum())
    w_neg = float(w[y == -1].sum())
    label = _majority(w_pos, w_neg)
    node_gini = _gini(w_pos, w_neg)
    if node_gini <= 0.0 or depth >= max_depth:
        return TreeNode(label=label)
    best = _best_split(X, y, w, min_leaf_size)
    if best is None or best[0] > node_gini + _EPS:
        return TreeNode(label=label)
    _, feature, threshold = best
    mask = X[:, feature] <= threshold
    left = _grow(X[mask], y[mask], w[mask], depth + 1, max_depth, min_leaf_size)
    right = _grow(X[~mask], y[~mask], w[~mask], depth + 1, max_depth, min_leaf_size)
    return TreeNode(feature, float(threshold), label, left, right)


def fit_tree(
    ds: LabeledDataset,
    max_depth: int,
    min_leaf_size: int = 1,
    sample_weight=None,
) -> DecisionTree:
    if max_depth < 1 or min_leaf_size < 1:
        raise ValueError("max_depth and min_leaf_size must be at least 1")
    if sample_weight is None:
        w = np.full(ds.n, 1.0 / ds.n)
    else:
        w = np.asarray(sample_weight, dtype=float)
        if w.shape != (ds.n,) or np.any(w < 0):
            raise ValueError("sample_weight must be N nonnegative reals")
    root = _grow(ds.features, ds.labels, w, 0, max_depth, min_leaf_size)
    return DecisionTree(root, ds.dim, max_depth, min_leaf_size)


def tree_classify(tree: DecisionTree, x):
    pred = tree.predict(as_matrix(x, tree.dim))
    return int(pred[0]) if np.ndim(x) == 1 else sign_labels(pred)


def tree_trace(tree: DecisionTree, x):
    """Ordered (feature, threshold, went_left) decisions for one point."""
    row = np.asarray(x, dtype=float)
    if row.shape != (tree.dim,):
        raise ValueError(f"expected a {tree.dim}-dimensional point")
    steps = []
    node = tree.root
    while not node.is_leaf:
        went_left = bool(row[node.feature] <= node.threshold)
        steps.append((node.feature, node.threshold, went_left))
        node = node.left if went_left else node.right
    return steps
