"""Shallow learners: variance-threshold PCA plus the four classifiers
used in the evaluation grid, all exposing fit / predict_score / to_blob.
"""

from __future__ import annotations

from .adaboost import AdaBoost
from .blob import empty_blob, pack_sections, unpack_sections
from .forest import RandomForest
from .logistic import LogisticRegression
from .pca import ExplainedVariancePCA
from .spaces import HEAD_SPACE, PCA_THRESHOLDS, SEARCH_SPACES, enumerate_space, grid_points
from .svm import SupportVectorMachine

ALGORITHMS = ("LR", "SVM", "RF", "AB")


def make_classifier(algorithm: str, params: dict, seed: int = 0):
    """Build an unfitted classifier from a search-space parameter dict."""
    if algorithm == "LR":
        return LogisticRegression(**params)
    if algorithm == "SVM":
        return SupportVectorMachine(**params)
    if algorithm == "RF":
        return RandomForest(**params, seed=seed)
    if algorithm == "AB":
        return AdaBoost(**params)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


__all__ = [
    "ALGORITHMS",
    "AdaBoost",
    "ExplainedVariancePCA",
    "HEAD_SPACE",
    "LogisticRegression",
    "PCA_THRESHOLDS",
    "RandomForest",
    "SEARCH_SPACES",
    "SupportVectorMachine",
    "empty_blob",
    "enumerate_space",
    "grid_points",
    "make_classifier",
    "pack_sections",
    "unpack_sections",
]
