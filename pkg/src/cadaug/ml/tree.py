"""CART decision tree with Gini impurity and midpoint thresholds."""

from __future__ import annotations

import sys

import numpy as np

__all__ = ["DecisionTreeClassifier", "tree_depth", "N_CLASSES"]

N_CLASSES = 6

_NO_LIMIT = sys.maxsize


def _best_split(
    sub: np.ndarray,
    y: np.ndarray,
    columns: np.ndarray,
    min_leaf: int,
) -> tuple[int, float] | None:
    """Best (feature, threshold) over the candidate columns, or None.

    ``sub`` holds only the candidate columns for the node's rows.  All
    candidate features are scored in one vectorized pass: labels are
    sorted per column, class counts accumulated with a prefix sum, and the
    split quality sum(left_counts^2)/n_left + sum(right_counts^2)/n_right
    (an affine rescaling of negative weighted Gini) maximized.  Ties break
    toward the lowest threshold, then the lowest feature index.
    """
    m = sub.shape[0]
    if m < 2 * min_leaf or m < 2:
        return None
    order = np.argsort(sub, axis=0, kind="stable")
    svals = np.take_along_axis(sub, order, axis=0)
    slabs = y[order]
    onehot = slabs[:, :, None] == np.arange(N_CLASSES)[None, None, :]
    cum = np.cumsum(onehot, axis=0, dtype=np.int32)
    left = cum[:-1]
    right = cum[-1][None, :, :] - left
    sizes = np.arange(1, m, dtype=np.float64)[:, None]
    score = (
        (left.astype(np.float64) ** 2).sum(axis=2) / sizes
        + (right.astype(np.float64) ** 2).sum(axis=2) / (m - sizes)
    )
    valid = (svals[1:] > svals[:-1]) & (sizes >= min_leaf) & (m - sizes >= min_leaf)
    score[~valid] = -np.inf
    per_column_pos = score.argmax(axis=0)
    per_column_best = score[per_column_pos, np.arange(score.shape[1])]
    j = int(per_column_best.argmax())
    if not np.isfinite(per_column_best[j]):
        return None
    pos = int(per_column_pos[j])
    lo = float(svals[pos, j])
    hi = float(svals[pos + 1, j])
    return int(columns[j]), lo + (hi - lo) / 2.0


def _grow(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    min_leaf: int,
    rng: np.random.Generator | None,
    mtry: int | None,
) -> dict:
    """Grow a tree iteratively (preorder, left child first)."""
    n_features = X.shape[1]
    root: dict = {}
    stack: list[tuple[dict, np.ndarray, int]] = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        labels = y[idx]
        counts = np.bincount(labels, minlength=N_CLASSES)
        majority = int(counts.argmax())
        if depth >= max_depth or counts.max() == idx.size:
            node["label"] = majority
            continue
        if mtry is not None and mtry < n_features:
            assert rng is not None
            columns = np.sort(rng.choice(n_features, size=mtry, replace=False))
        else:
            columns = np.arange(n_features)
        found = _best_split(X[np.ix_(idx, columns)], labels, columns, min_leaf)
        if found is None:
            node["label"] = majority
            continue
        feature, threshold = found
        mask = X[idx, feature] <= threshold
        if not mask.any() or mask.all():
            node["label"] = majority
            continue
        left: dict = {}
        right: dict = {}
        node["feature"] = feature
        node["threshold"] = threshold
        node["left"] = left
        node["right"] = right
        stack.append((right, idx[~mask], depth + 1))
        stack.append((left, idx[mask], depth + 1))
    return root


def _predict_tree(root: dict, X: np.ndarray, out: np.ndarray) -> None:
    stack: list[tuple[dict, np.ndarray]] = [(root, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if "label" in node:
            out[idx] = node["label"]
            continue
        mask = X[idx, node["feature"]] <= node["threshold"]
        stack.append((node["right"], idx[~mask]))
        stack.append((node["left"], idx[mask]))


def tree_depth(node: dict) -> int:
    """Number of split levels below this node (a leaf has depth 0)."""
    best = 0
    stack = [(node, 0)]
    while stack:
        current, depth = stack.pop()
        if "label" in current:
            best = max(best, depth)
            continue
        stack.append((current["left"], depth + 1))
        stack.append((current["right"], depth + 1))
    return best


class DecisionTreeClassifier:
    """Deterministic CART classifier.

    ``max_depth=None`` means unbounded; ``min_leaf`` is the minimum number
    of training rows each side of a split must keep.
    """

    kind = "dt"

    def __init__(self, max_depth: int | None = None, min_leaf: int = 1) -> None:
        if max_depth is not None and max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        if min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        self.max_depth = max_depth
        self.min_leaf = int(min_leaf)
        self.tree: dict | None = None
        self._n_features: int | None = None

    @property
    def n_features(self) -> int:
        if self._n_features is None:
            raise ValueError("classifier is not fitted")
        return self._n_features

    def fit(
        self,
        X: np.ndarray,
        y: np.ndarray,
        rng: np.random.Generator | None = None,
        mtry: int | None = None,
    ) -> "DecisionTreeClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
            raise ValueError("X and y must be non-empty with matching row counts")
        bound = self.max_depth if self.max_depth is not None else _NO_LIMIT
        self.tree = _grow(X, y, bound, self.min_leaf, rng, mtry)
        self._n_features = X.shape[1]
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.tree is None:
            raise ValueError("classifier is not fitted")
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.int64)
        _predict_tree(self.tree, X, out)
        return out

    def depth(self) -> int:
        if self.tree is None:
            raise ValueError("classifier is not fitted")
        return tree_depth(self.tree)

    def to_payload(self) -> dict:
        if self.tree is None:
            raise ValueError("classifier is not fitted")
        return {
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "n_features": self._n_features,
            "tree": self.tree,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "DecisionTreeClassifier":
        model = cls(max_depth=payload["max_depth"], min_leaf=payload["min_leaf"])
        model.tree = payload["tree"]
        model._n_features = payload["n_features"]
        return model
