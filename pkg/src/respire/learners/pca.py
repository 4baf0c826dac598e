"""PCA keeping the smallest component count that reaches a target
explained-variance ratio."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..errors import DegenerateData
from .spaces import PCA_THRESHOLDS
from .validation import check_features


class ExplainedVariancePCA(BaseEstimator, TransformerMixin):
    """Principal components of centered data, truncated at the first k
    whose cumulative explained-variance ratio reaches ``threshold``.

    ``threshold`` must be one of the supported grid values
    (0.6, 0.65, ..., 0.95, 0.99).
    """

    def __init__(self, threshold: float = 0.95):
        self.threshold = threshold

    def fit(self, X, y=None):
        if not any(abs(self.threshold - t) < 1e-12 for t in PCA_THRESHOLDS):
            raise ValueError(
                f"threshold {self.threshold} not in supported set {PCA_THRESHOLDS}"
            )
        X = check_features(X)
        n, d = X.shape
        if n < 2:
            raise ValueError("PCA needs at least 2 rows")
        mean = X.mean(axis=0)
        centered = X - mean
        # SVD of the centered matrix; singular values give the covariance
        # eigenvalues as s^2 / (n - 1).
        _, s, vt = np.linalg.svd(centered, full_matrices=False)
        variances = s**2 / (n - 1)
        total = variances.sum()
        if total <= 0.0:
            raise DegenerateData("data has zero total variance")
        ratios = variances / total
        k = int(np.searchsorted(np.cumsum(ratios), self.threshold - 1e-12)) + 1
        k = min(k, ratios.size)

        components = vt[:k]
        # Canonical sign: make the largest-|.| entry of each row positive.
        flips = np.sign(components[np.arange(k), np.argmax(np.abs(components), axis=1)])
        flips[flips == 0] = 1.0
        self.mean_ = mean
        self.components_ = components * flips[:, None]
        self.explained_variance_ratio_ = ratios[:k]
        self.n_components_ = k
        return self

    def transform(self, X) -> np.ndarray:
        X = check_features(X)
        return (X - self.mean_) @ self.components_.T
