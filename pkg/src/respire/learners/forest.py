"""Random forest of CART trees: bootstrap rows, sqrt(d) random feature
subsets per node, class-vote scores and out-of-bag estimates."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .blob import pack_sections
from .validation import check_binary_labels, check_features

_LEAF = -1


def _impurity(p1: np.ndarray, criterion: str) -> np.ndarray:
    p1 = np.clip(p1, 0.0, 1.0)
    p0 = 1.0 - p1
    if criterion == "gini":
        return 1.0 - p0**2 - p1**2
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p0 > 0, p0 * np.log2(p0), 0.0) - np.where(
            p1 > 0, p1 * np.log2(p1), 0.0
        )
    return h


class _Tree:
    """CART tree stored as flat node arrays."""

    def __init__(self, max_depth: int, min_samples_split: int, criterion: str):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.criterion = criterion
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []  # class at leaves, 0 elsewhere

    def _best_split(self, X, y, features):
        best = None  # (score, feature, threshold)
        for j in features:
            x = X[:, j]
            order = np.argsort(x, kind="stable")
            xs, ys = x[order], y[order]
            if xs[0] == xs[-1]:
                continue
            n = xs.size
            cum1 = np.cumsum(ys)
            left_n = np.arange(1, n, dtype=np.float64)
            left_1 = cum1[:-1].astype(np.float64)
            right_n = n - left_n
            right_1 = cum1[-1] - left_1
            weighted = (
                left_n * _impurity(left_1 / left_n, self.criterion)
                + right_n * _impurity(right_1 / right_n, self.criterion)
            ) / n
            weighted[xs[1:] == xs[:-1]] = np.inf  # cannot split inside ties
            pos = int(np.argmin(weighted))
            if not np.isfinite(weighted[pos]):
                continue
            score = float(weighted[pos])
            if best is None or score < best[0] - 1e-15:
                best = (score, j, 0.5 * (xs[pos] + xs[pos + 1]))
        return best

    def _add_leaf(self, y) -> int:
        node = len(self.feature)
        self.feature.append(_LEAF)
        self.threshold.append(0.0)
        self.left.append(_LEAF)
        self.right.append(_LEAF)
        counts = np.bincount(y, minlength=2)
        self.value.append(float(np.argmax(counts)))
        return node

    def _build(self, X, y, depth: int, max_features: int, rng) -> int:
        n = y.size
        if (
            depth >= self.max_depth
            or n < self.min_samples_split
            or y.min() == y.max()
        ):
            return self._add_leaf(y)
        features = np.sort(rng.choice(X.shape[1], size=max_features, replace=False))
        split = self._best_split(X, y, features)
        if split is None:
            return self._add_leaf(y)
        _, j, threshold = split
        mask = X[:, j] <= threshold
        node = len(self.feature)
        self.feature.append(j)
        self.threshold.append(threshold)
        self.left.append(0)
        self.right.append(0)
        self.value.append(0.0)
        self.left[node] = self._build(X[mask], y[mask], depth + 1, max_features, rng)
        self.right[node] = self._build(X[~mask], y[~mask], depth + 1, max_features, rng)
        return node

    def fit(self, X, y, max_features: int, rng) -> "_Tree":
        self._build(X, y, 0, max_features, rng)
        self.feature_arr = np.array(self.feature, dtype=np.int64)
        self.threshold_arr = np.array(self.threshold)
        self.left_arr = np.array(self.left, dtype=np.int64)
        self.right_arr = np.array(self.right, dtype=np.int64)
        self.value_arr = np.array(self.value)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature_arr[node] != _LEAF
        while active.any():
            idx = np.flatnonzero(active)
            cur = node[idx]
            go_left = X[idx, self.feature_arr[cur]] <= self.threshold_arr[cur]
            node[idx] = np.where(go_left, self.left_arr[cur], self.right_arr[cur])
            active = self.feature_arr[node] != _LEAF
        return self.value_arr[node]

    def node_table(self) -> np.ndarray:
        return np.column_stack(
            [self.feature_arr, self.threshold_arr, self.left_arr, self.right_arr, self.value_arr]
        )


class RandomForest(BaseEstimator, ClassifierMixin):
    def __init__(
        self,
        estimators: int = 100,
        min_samples_split: int = 2,
        max_depth: int = 10,
        criterion: str = "gini",
        seed: int = 0,
    ):
        self.estimators = estimators
        self.min_samples_split = min_samples_split
        self.max_depth = max_depth
        self.criterion = criterion
        self.seed = seed

    def fit(self, X, y):
        if self.criterion not in ("gini", "entropy"):
            raise ValueError(f"criterion must be 'gini' or 'entropy', got {self.criterion!r}")
        X = check_features(X)
        y = check_binary_labels(y, X.shape[0])
        n, d = X.shape
        max_features = max(1, int(np.sqrt(d)))
        rng = np.random.default_rng(self.seed)
        self.trees_ = []
        votes = np.zeros(n)
        counts = np.zeros(n)
        for _ in range(self.estimators):
            rows = rng.integers(0, n, size=n)
            tree = _Tree(self.max_depth, self.min_samples_split, self.criterion)
            tree.fit(X[rows], y[rows], max_features, rng)
            self.trees_.append(tree)
            oob = np.setdiff1d(np.arange(n), rows, assume_unique=False)
            if oob.size:
                votes[oob] += tree.predict(X[oob])
                counts[oob] += 1.0
        with np.errstate(invalid="ignore"):
            self.oob_scores_ = np.where(counts > 0, votes / np.maximum(counts, 1.0), np.nan)
        return self

    def predict_score(self, X) -> np.ndarray:
        """Fraction of trees voting for the positive class."""
        X = check_features(X)
        total = np.zeros(X.shape[0])
        for tree in self.trees_:
            total += tree.predict(X)
        return total / len(self.trees_)

    def predict(self, X) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)

    def to_blob(self) -> bytes:
        return pack_sections(
            "RF",
            [(f"tree_{i}", tree.node_table()) for i, tree in enumerate(self.trees_)],
        )
