"""Input validation shared by the estimators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonFiniteFeature, SingleClass


def check_features(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"feature matrix must be 2-D, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise NonFiniteFeature("feature matrix contains NaN or Inf")
    return X


def check_binary_labels(y, n_rows: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (n_rows,):
        raise ValueError(f"labels must have shape ({n_rows},), got {y.shape}")
    y = y.astype(np.int64)
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    if y.min() == y.max():
        raise SingleClass("training labels hold a single class")
    return y


@dataclass(frozen=True)
class Standardizer:
    """Per-feature mean/std fitted on training data."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        std = X.std(axis=0)
        return cls(X.mean(axis=0), np.where(std > 0.0, std, 1.0))

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std
