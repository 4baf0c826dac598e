"""Fully-connected classification head over pooled embeddings.

ReLU hidden layers with inverted dropout, a 2-unit softmax output, Adam
training on cross-entropy with early stopping on validation PR-AUC. All
randomness (init, batch order, dropout masks) flows from the config seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .learners.blob import pack_sections
from .learners.spaces import HEAD_SPACE
from .learners.validation import check_binary_labels, check_features
from .metrics import pr_auc

ADAM_LR = 1e-3
BATCH_SIZE = 32
PATIENCE = 10


@dataclass(frozen=True)
class HeadConfig:
    """Head geometry. Searches sample from HEAD_SPACE, but any positive
    width is constructible so that tiny models (e.g. gradient checks) can
    be built."""

    hidden_layers: int
    hidden_units: int
    dropout_rate: float
    input_dim: int
    seed: int

    def __post_init__(self):
        if self.hidden_layers not in HEAD_SPACE["hidden_layers"]:
            raise ValueError(
                f"hidden_layers={self.hidden_layers} not in {HEAD_SPACE['hidden_layers']}"
            )
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be positive")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")


@dataclass
class HeadModel:
    """Layer weights plus the training trace that produced them."""

    config: HeadConfig
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    trace: list[dict] = field(default_factory=list)
    _rng: np.random.Generator = field(default=None, repr=False)

    @classmethod
    def initialize(cls, config: HeadConfig) -> "HeadModel":
        rng = np.random.default_rng(config.seed)
        dims = [config.input_dim] + [config.hidden_units] * config.hidden_layers + [2]
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            limit = np.sqrt(6.0 / fan_in)  # He-uniform
            weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(config=config, weights=weights, biases=biases, _rng=rng)

    def parameter_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def to_blob(self) -> bytes:
        sections = []
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            sections.append((f"W{i}", w))
            sections.append((f"b{i}", b))
        return pack_sections("MLP", sections)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def forward(model: HeadModel, X, train_mode: bool = False) -> np.ndarray:
    """Class probabilities, rows summing to 1.

    In train_mode, hidden activations pass through inverted dropout
    (scaled by 1/(1-p)) drawn from the model's generator.
    """
    X = check_features(X)
    if X.shape[1] != model.config.input_dim:
        raise DimensionMismatch(
            f"input has {X.shape[1]} columns, head expects {model.config.input_dim}"
        )
    probs, _ = _forward_cached(model, X, train_mode)
    return probs


def _forward_cached(model: HeadModel, X: np.ndarray, train_mode: bool):
    p = model.config.dropout_rate
    activations = [X]
    h = X
    masks = []
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        h = np.maximum(h @ w + b, 0.0)
        if train_mode and p > 0.0:
            mask = (model._rng.random(h.shape) >= p) / (1.0 - p)
            h = h * mask
            masks.append(mask)
        else:
            masks.append(None)
        activations.append(h)
    logits = h @ model.weights[-1] + model.biases[-1]
    return _softmax(logits), (activations, masks)


def loss_and_gradients(model: HeadModel, X, y) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
    """Mean cross-entropy and its gradients (dropout disabled)."""
    X = check_features(X)
    y = np.asarray(y, dtype=np.int64)
    probs, (activations, _) = _forward_cached(model, X, train_mode=False)
    n = X.shape[0]
    loss = float(-np.mean(np.log(probs[np.arange(n), y] + 1e-300)))
    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    return loss, *_backprop(model, activations, [None] * len(activations), delta)


def _backprop(model, activations, masks, delta):
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.biases)
    for layer in range(len(model.weights) - 1, -1, -1):
        grads_w[layer] = activations[layer].T @ delta
        grads_b[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = delta @ model.weights[layer].T
            if masks[layer - 1] is not None:
                delta = delta * masks[layer - 1]
            delta = delta * (activations[layer] > 0.0)
    return grads_w, grads_b


def train(
    config: HeadConfig,
    X,
    y,
    X_val,
    y_val,
    epochs: int,
    learning_rate: float = ADAM_LR,
    batch_size: int = BATCH_SIZE,
    patience: int = PATIENCE,
) -> HeadModel:
    """Adam training with per-epoch validation PR-AUC and early stopping.

    The weights giving the best validation PR-AUC are restored before
    returning; the per-epoch trace stays on the model.
    """
    X = check_features(X)
    y = check_binary_labels(y, X.shape[0])
    X_val = check_features(X_val)
    y_val = np.asarray(y_val, dtype=np.int64)
    if epochs < 1:
        raise ValueError("epochs must be >= 1")

    model = HeadModel.initialize(config)
    m_w = [np.zeros_like(w) for w in model.weights]
    v_w = [np.zeros_like(w) for w in model.weights]
    m_b = [np.zeros_like(b) for b in model.biases]
    v_b = [np.zeros_like(b) for b in model.biases]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0

    best_score = -np.inf
    best_weights = None
    stale = 0
    n = X.shape[0]
    for epoch in range(epochs):
        order = model._rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            xb, yb = X[batch], y[batch]
            probs, (activations, masks) = _forward_cached(model, xb, train_mode=True)
            rows = np.arange(xb.shape[0])
            epoch_loss += float(-np.sum(np.log(probs[rows, yb] + 1e-300)))
            delta = probs.copy()
            delta[rows, yb] -= 1.0
            delta /= xb.shape[0]
            grads_w, grads_b = _backprop(model, activations, masks, delta)
            step += 1
            for i in range(len(model.weights)):
                m_w[i] = beta1 * m_w[i] + (1 - beta1) * grads_w[i]
                v_w[i] = beta2 * v_w[i] + (1 - beta2) * grads_w[i] ** 2
                m_b[i] = beta1 * m_b[i] + (1 - beta1) * grads_b[i]
                v_b[i] = beta2 * v_b[i] + (1 - beta2) * grads_b[i] ** 2
                mhat_w = m_w[i] / (1 - beta1**step)
                vhat_w = v_w[i] / (1 - beta2**step)
                mhat_b = m_b[i] / (1 - beta1**step)
                vhat_b = v_b[i] / (1 - beta2**step)
                model.weights[i] -= learning_rate * mhat_w / (np.sqrt(vhat_w) + eps)
                model.biases[i] -= learning_rate * mhat_b / (np.sqrt(vhat_b) + eps)

        val_scores = forward(model, X_val)[:, 1]
        val_auc = pr_auc(val_scores, y_val)
        model.trace.append(
            {"epoch": epoch, "train_loss": epoch_loss / n, "val_pr_auc": val_auc}
        )
        if val_auc > best_score + 1e-12:
            best_score = val_auc
            best_weights = (
                [w.copy() for w in model.weights],
                [b.copy() for b in model.biases],
            )
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                break
    if best_weights is not None:
        model.weights, model.biases = best_weights
    return model
