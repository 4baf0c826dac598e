"""User-grouped 5-fold nested cross-validation.

The outer loop estimates generalization; the inner loop, run entirely
inside each development set, tunes PCA threshold x classifier
hyperparameters (shallow path) or the head configuration via Hyperband
(fine-tuning path). PCA and feature standardizers only ever see training
rows. User-disjointness is re-checked on every split.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import LeakageError, SingleClass
from ..learners import ExplainedVariancePCA, grid_points, make_classifier
from ..learners.spaces import HEAD_SPACE, PCA_THRESHOLDS
from ..learners.validation import check_binary_labels, check_features
from ..metrics import pr_auc
from .. import hyperband as hb
from .. import mlp
from .folds import FoldPlan, user_grouped_folds

GRID_LIMIT = 500
RANDOM_TRIALS = 60

SHALLOW_ALGORITHMS = ("LR", "SVM", "RF", "AB")
HEAD_ALGORITHM = "MLP"


@dataclass(frozen=True)
class SearchBudget:
    grid_limit: int = GRID_LIMIT
    random_trials: int = RANDOM_TRIALS
    hyperband_R: int = 27
    hyperband_eta: int = 3
    head_space: dict = field(default_factory=lambda: dict(HEAD_SPACE))


def _derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


def _blob_parameters(blob: bytes) -> int:
    from ..learners.blob import unpack_sections

    _, sections = unpack_sections(blob)
    return sum(int(arr.size) for _, arr in sections)


def _candidates(algorithm: str, seed: int, budget: SearchBudget) -> tuple[str, list[dict]]:
    """Tuning candidates: the full (threshold x params) grid, or a seeded
    uniform sample of it when the grid exceeds the limit."""
    full = [
        {"pca_threshold": thr, "params": params}
        for thr in PCA_THRESHOLDS
        for params in grid_points(algorithm)
    ]
    if len(full) <= budget.grid_limit:
        return "grid", full
    rng = np.random.default_rng(_derive_seed(seed, 0xC0FFEE))
    chosen = rng.choice(len(full), size=min(budget.random_trials, len(full)), replace=False)
    return "random", [full[int(i)] for i in sorted(chosen)]


def _rows_for(users_per_row: np.ndarray, user_set: set[str]) -> np.ndarray:
    return np.flatnonzero(np.isin(users_per_row, sorted(user_set)))


def _check_disjoint(train_users: set[str], test_users: set[str], context: str) -> None:
    overlap = train_users & test_users
    if overlap:
        raise LeakageError(f"{context}: users on both sides: {sorted(overlap)[:5]}")


def _mean_valid(scores: list[float | None]) -> float:
    valid = [s for s in scores if s is not None]
    return float(np.mean(valid)) if valid else 0.0


def _evaluate_candidate(candidate, cache, y, fold_pairs, algorithm, seed, outer_fold):
    """Mean inner-validation PR-AUC; single-class inner folds are skipped."""
    scores: list[float | None] = []
    for inner_fold, (train_idx, val_idx) in enumerate(fold_pairs):
        y_tr, y_val = y[train_idx], y[val_idx]
        if y_tr.min() == y_tr.max() or y_val.min() == y_val.max():
            scores.append(None)
            continue
        Z_tr, Z_val = cache[(inner_fold, candidate["pca_threshold"])]
        model_seed = _derive_seed(seed, outer_fold, inner_fold)
        model = make_classifier(algorithm, candidate["params"], seed=model_seed)
        model.fit(Z_tr, y_tr)
        scores.append(pr_auc(model.predict_score(Z_val), y_val))
    return _mean_valid(scores)


def _shallow_fold(
    X, y, users_per_row, plan: FoldPlan, outer_fold: int, algorithm: str,
    seed: int, candidates: list[dict], workers: int,
) -> dict:
    dev_users, test_users = plan.outer_split(outer_fold)
    _check_disjoint(dev_users, test_users, f"outer fold {outer_fold}")
    dev_idx = _rows_for(users_per_row, dev_users)
    test_idx = _rows_for(users_per_row, test_users)

    # Inner folds and per-threshold PCA projections, fitted on inner-train
    # rows only.
    fold_pairs = []
    for inner_fold in range(plan.k):
        tr_users, val_users = plan.inner_split(outer_fold, inner_fold)
        _check_disjoint(tr_users, val_users, f"inner fold {inner_fold} of outer {outer_fold}")
        fold_pairs.append(
            (_rows_for(users_per_row, tr_users), _rows_for(users_per_row, val_users))
        )
    thresholds = sorted({c["pca_threshold"] for c in candidates})
    cache = {}
    for inner_fold, (train_idx, val_idx) in enumerate(fold_pairs):
        for thr in thresholds:
            reducer = ExplainedVariancePCA(threshold=thr).fit(X[train_idx])
            cache[(inner_fold, thr)] = (
                reducer.transform(X[train_idx]),
                reducer.transform(X[val_idx]),
            )

    def score_one(candidate):
        return _evaluate_candidate(
            candidate, cache, y, fold_pairs, algorithm, seed, outer_fold
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            inner_scores = list(pool.map(score_one, candidates))
    else:
        inner_scores = [score_one(c) for c in candidates]
    best_idx = int(np.argmax(inner_scores))
    best = candidates[best_idx]

    reducer = ExplainedVariancePCA(threshold=best["pca_threshold"]).fit(X[dev_idx])
    model = make_classifier(
        algorithm, best["params"], seed=_derive_seed(seed, outer_fold, 999983)
    )
    model.fit(reducer.transform(X[dev_idx]), y[dev_idx])
    outer_score = pr_auc(model.predict_score(reducer.transform(X[test_idx])), y[test_idx])
    blob = model.to_blob()
    return {
        "fold": outer_fold,
        "pr_auc": float(outer_score),
        "inner_pr_auc": float(inner_scores[best_idx]),
        "pca_threshold": best["pca_threshold"],
        "pca_components": int(reducer.n_components_),
        "params": dict(best["params"]),
        "model_bytes": len(blob),
        "model_parameters": _blob_parameters(blob),
        "n_dev_rows": int(dev_idx.size),
        "n_test_rows": int(test_idx.size),
    }


def _head_fold(
    X, y, users_per_row, plan: FoldPlan, outer_fold: int,
    seed: int, budget: SearchBudget,
) -> dict:
    dev_users, test_users = plan.outer_split(outer_fold)
    _check_disjoint(dev_users, test_users, f"outer fold {outer_fold}")
    dev_idx = _rows_for(users_per_row, dev_users)
    test_idx = _rows_for(users_per_row, test_users)
    X_dev, y_dev = X[dev_idx], y[dev_idx]
    dev_users_per_row = users_per_row[dev_idx]

    fold_pairs = []
    for inner_fold in range(plan.k):
        tr_users, val_users = plan.inner_split(outer_fold, inner_fold)
        _check_disjoint(tr_users, val_users, f"inner fold {inner_fold} of outer {outer_fold}")
        tr = _rows_for(dev_users_per_row, tr_users)
        val = _rows_for(dev_users_per_row, val_users)
        if y_dev[tr].min() != y_dev[tr].max() and y_dev[val].min() != y_dev[val].max():
            fold_pairs.append((tr, val))
    if not fold_pairs:
        raise SingleClass(f"outer fold {outer_fold}: no two-class inner folds")

    best_config, trace = hb.hyperband_search(
        X_dev,
        y_dev,
        fold_pairs,
        R=budget.hyperband_R,
        eta=budget.hyperband_eta,
        seed=_derive_seed(seed, outer_fold, 0x5EED),
        space=budget.head_space,
    )
    # Refit at the full budget on the whole development set; the dev set
    # itself monitors early stopping since the test fold must stay unseen.
    model = mlp.train(
        best_config, X_dev, y_dev, X_dev, y_dev, epochs=budget.hyperband_R
    )
    outer_score = pr_auc(mlp.forward(model, X[test_idx])[:, 1], y[test_idx])
    blob = model.to_blob()
    return {
        "fold": outer_fold,
        "pr_auc": float(outer_score),
        "head_config": {
            "hidden_layers": best_config.hidden_layers,
            "hidden_units": best_config.hidden_units,
            "dropout_rate": best_config.dropout_rate,
            "input_dim": best_config.input_dim,
            "seed": best_config.seed,
        },
        "head_parameters": model.parameter_count(),
        "model_bytes": len(blob),
        "model_parameters": _blob_parameters(blob),
        "hyperband_evaluations": len(trace),
        "n_dev_rows": int(dev_idx.size),
        "n_test_rows": int(test_idx.size),
    }


def nested_cv(
    features,
    labels,
    users,
    algorithm: str,
    seed: int,
    k: int = 5,
    budget: SearchBudget | None = None,
    workers: int = 1,
) -> dict:
    """One experiment cell: per-outer-fold PR-AUC and chosen settings.

    ``users`` gives the owning user of each feature row; folds are always
    user-grouped. ``algorithm`` is LR, SVM, RF, AB, or MLP (Hyperband-tuned
    head).
    """
    if algorithm != HEAD_ALGORITHM and algorithm not in SHALLOW_ALGORITHMS:
        raise ValueError(
            f"algorithm must be one of {SHALLOW_ALGORITHMS + (HEAD_ALGORITHM,)}, "
            f"got {algorithm!r}"
        )
    X = check_features(features)
    y = check_binary_labels(labels, X.shape[0])
    users_per_row = np.asarray(users, dtype=object)
    if users_per_row.shape != (X.shape[0],):
        raise ValueError("users must align with feature rows")
    budget = budget or SearchBudget()

    plan = user_grouped_folds(users_per_row.tolist(), k=k, seed=seed)
    folds = []
    if algorithm == HEAD_ALGORITHM:
        strategy, n_candidates = "hyperband", None
        for outer_fold in range(k):
            folds.append(
                _head_fold(X, y, users_per_row, plan, outer_fold, seed, budget)
            )
    else:
        strategy, candidates = _candidates(algorithm, seed, budget)
        n_candidates = len(candidates)
        for outer_fold in range(k):
            folds.append(
                _shallow_fold(
                    X, y, users_per_row, plan, outer_fold, algorithm,
                    seed, candidates, workers,
                )
            )
    return {
        "algorithm": algorithm,
        "seed": seed,
        "k": k,
        "n_rows": int(X.shape[0]),
        "n_users": len(set(users_per_row.tolist())),
        "search": {"strategy": strategy, "candidates": n_candidates},
        "folds": folds,
        "mean_pr_auc": float(np.mean([f["pr_auc"] for f in folds])),
    }
