"""Hyperparameter grids for the shallow classifiers, the PCA threshold
set, and the search space of the fine-tuning head."""

from __future__ import annotations

from itertools import product

_LOG_7 = (1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0)
_LOG_5 = (1e-3, 1e-2, 1e-1, 1.0, 10.0)

SEARCH_SPACES: dict[str, tuple[tuple[str, tuple], ...]] = {
    "SVM": (
        ("regularization", _LOG_7),
        ("kernel", ("rbf", "poly", "sigmoid")),
        ("kernel_coefficient", _LOG_5),
        ("degree", (2, 3, 4, 5)),
    ),
    "AB": (
        ("estimators", (10, 20, 50, 100)),
        ("learning_rate", (1.0, 0.5, 0.1, 0.05, 0.01, 0.001)),
    ),
    "LR": (
        ("penalty", ("l1", "l2")),
        ("regularization", _LOG_7),
    ),
    "RF": (
        ("estimators", (10, 20, 50, 100)),
        ("min_samples_split", (2, 8, 10, 12)),
        ("max_depth", (10, 30, 50)),
        ("criterion", ("entropy", "gini")),
    ),
}

PCA_THRESHOLDS = (0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99)

HEAD_SPACE: dict[str, tuple] = {
    "hidden_layers": (1, 2, 3, 4, 5),
    "hidden_units": (128, 512, 1024, 2048, 6144),
    "dropout_rate": (0.0, 0.1, 0.2, 0.3, 0.4),
}


def enumerate_space(algorithm: str) -> tuple[tuple[str, tuple], ...]:
    """The (parameter, values) grid of one shallow classifier."""
    try:
        return SEARCH_SPACES[algorithm]
    except KeyError:
        raise ValueError(
            f"unknown algorithm {algorithm!r}; expected one of {sorted(SEARCH_SPACES)}"
        ) from None


def grid_points(algorithm: str) -> list[dict]:
    """The full cartesian product of one classifier's grid."""
    space = enumerate_space(algorithm)
    names = [name for name, _ in space]
    return [dict(zip(names, combo)) for combo in product(*(vals for _, vals in space))]
