"""Hyperband search over head configurations.

Brackets s = s_max..0 sample n = ceil((s_max+1)/(s+1) * eta^s) configs and
train them for r = R * eta^-s epochs; each rung promotes the best 1/eta to
eta times the budget. Scores are mean validation PR-AUC across the given
folds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBudget
from .learners.spaces import HEAD_SPACE
from .metrics import pr_auc
from .mlp import HeadConfig, forward, train


@dataclass(frozen=True)
class Rung:
    bracket: int
    n_configs: int
    epochs: int


def hyperband_schedule(R: int, eta: int) -> list[list[Rung]]:
    """The bracket/rung table for a maximum budget of R epochs."""
    if eta < 2 or R < eta:
        raise InvalidBudget(f"need R >= eta >= 2, got R={R}, eta={eta}")
    s_max = int(math.floor(math.log(R) / math.log(eta) + 1e-12))
    brackets = []
    for s in range(s_max, -1, -1):
        n = int(math.ceil((s_max + 1) / (s + 1) * eta**s - 1e-12))
        rungs = []
        for i in range(s + 1):
            n_i = int(math.floor(n * eta**-i + 1e-12))
            r_i = max(1, int(math.floor(R * eta ** (i - s) + 1e-12)))
            rungs.append(Rung(bracket=s, n_configs=n_i, epochs=r_i))
        brackets.append(rungs)
    return brackets


def _sample_configs(space: dict, n: int, input_dim: int, rng, seed_stream) -> list[HeadConfig]:
    configs = []
    for _ in range(n):
        choice = {key: values[rng.integers(len(values))] for key, values in space.items()}
        configs.append(
            HeadConfig(input_dim=input_dim, seed=int(next(seed_stream)), **choice)
        )
    return configs


def hyperband_search(
    X,
    y,
    folds: list[tuple[np.ndarray, np.ndarray]],
    R: int = 27,
    eta: int = 3,
    seed: int = 0,
    space: dict | None = None,
) -> tuple[HeadConfig, list[dict]]:
    """Best head configuration by mean inner-validation PR-AUC.

    ``folds`` are (train_indices, val_indices) pairs into X/y. Returns the
    winning config and the evaluation trace of every rung.
    """
    space = dict(space) if space is not None else dict(HEAD_SPACE)
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    input_dim = X.shape[1]
    rng = np.random.default_rng(seed)
    seed_stream = iter(np.random.SeedSequence(seed).generate_state(10_000).tolist())

    def evaluate(config: HeadConfig, epochs: int) -> float:
        scores = []
        for train_idx, val_idx in folds:
            model = train(
                config, X[train_idx], y[train_idx], X[val_idx], y[val_idx], epochs=epochs
            )
            scores.append(pr_auc(forward(model, X[val_idx])[:, 1], y[val_idx]))
        return float(np.mean(scores))

    trace: list[dict] = []
    best_config, best_score = None, -np.inf
    for rungs in hyperband_schedule(R, eta):
        candidates = _sample_configs(space, rungs[0].n_configs, input_dim, rng, seed_stream)
        for rung_idx, rung in enumerate(rungs):
            scored = [(evaluate(cfg, rung.epochs), i, cfg) for i, cfg in enumerate(candidates)]
            for score, _, cfg in scored:
                trace.append(
                    {
                        "bracket": rung.bracket,
                        "rung": rung_idx,
                        "epochs": rung.epochs,
                        "config": cfg,
                        "pr_auc": score,
                    }
                )
                if score > best_score:
                    best_score, best_config = score, cfg
            if rung_idx + 1 < len(rungs):
                keep = max(1, int(math.floor(rung.n_configs / eta)))
                scored.sort(key=lambda item: (-item[0], item[1]))
                candidates = [cfg for _, _, cfg in scored[:keep]]
    return best_config, trace
