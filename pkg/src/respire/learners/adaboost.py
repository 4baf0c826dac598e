"""Discrete AdaBoost (SAMME) over depth-1 decision stumps."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .blob import pack_sections
from .validation import check_binary_labels, check_features

_EPS = 1e-12


def _fit_stump(X: np.ndarray, y: np.ndarray, w: np.ndarray):
    """Weighted-error-optimal axis stump.

    Returns (feature, threshold, polarity): polarity +1 predicts 1 above
    the threshold, -1 predicts 1 below it.
    """
    best = (np.inf, 0, -np.inf, 1.0)
    w1 = w * (y == 1)
    w0 = w * (y == 0)
    total1, total0 = w1.sum(), w0.sum()
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        c1 = np.concatenate([[0.0], np.cumsum(w1[order])])  # weight of y=1 at or below cut
        c0 = np.concatenate([[0.0], np.cumsum(w0[order])])
        # cut k sends rows [0, k) left; thresholds live between duplicates
        valid = np.concatenate([[True], xs[1:] != xs[:-1], [True]])
        # polarity +1: predict 1 on the right: err = w1 left + w0 right
        err_pos = c1 + (total0 - c0)
        err_neg = c0 + (total1 - c1)
        err_pos[~valid] = np.inf
        err_neg[~valid] = np.inf
        for errs, polarity in ((err_pos, 1.0), (err_neg, -1.0)):
            k = int(np.argmin(errs))
            if errs[k] < best[0] - 1e-15:
                if k == 0:
                    threshold = -np.inf
                elif k == xs.size:
                    threshold = np.inf
                else:
                    threshold = 0.5 * (xs[k - 1] + xs[k])
                best = (float(errs[k]), j, threshold, polarity)
    _, feature, threshold, polarity = best
    return feature, threshold, polarity


def _stump_predict(X, feature, threshold, polarity) -> np.ndarray:
    above = X[:, int(feature)] > threshold
    return np.where(above, polarity > 0, polarity < 0).astype(np.int64)


class AdaBoost(BaseEstimator, ClassifierMixin):
    def __init__(self, estimators: int = 100, learning_rate: float = 1.0):
        self.estimators = estimators
        self.learning_rate = learning_rate

    def fit(self, X, y):
        X = check_features(X)
        y = check_binary_labels(y, X.shape[0])
        n = X.shape[0]
        w = np.full(n, 1.0 / n)
        stumps: list[tuple[int, float, float, float]] = []  # feature, thr, pol, alpha
        for _ in range(self.estimators):
            feature, threshold, polarity = _fit_stump(X, y, w)
            pred = _stump_predict(X, feature, threshold, polarity)
            miss = pred != y
            err = float(w[miss].sum())
            if err >= 0.5 - _EPS:
                if not stumps:  # keep one stump even if it is no better than chance
                    stumps.append((feature, threshold, polarity, 0.0))
                break
            err = max(err, _EPS)
            alpha = self.learning_rate * np.log((1.0 - err) / err)
            stumps.append((feature, threshold, polarity, alpha))
            if err <= _EPS:
                break
            w = w * np.exp(alpha * miss)
            w /= w.sum()
        self.stumps_ = stumps
        return self

    def decision_function(self, X) -> np.ndarray:
        X = check_features(X)
        margin = np.zeros(X.shape[0])
        for feature, threshold, polarity, alpha in self.stumps_:
            h = 2.0 * _stump_predict(X, feature, threshold, polarity) - 1.0
            margin += alpha * h
        return margin

    def predict_score(self, X) -> np.ndarray:
        """Logistic squashing of the weighted ensemble margin."""
        margin = self.decision_function(X)
        return 1.0 / (1.0 + np.exp(-np.clip(margin, -500, 500)))

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(np.int64)

    def to_blob(self) -> bytes:
        return pack_sections("AB", [("stumps", np.array(self.stumps_))])
