"""Binary logistic regression with l1 or l2 penalty.

The l2 objective is minimized with L-BFGS; the l1 objective with proximal
(soft-thresholded) coordinate descent under the 0.25 curvature bound of
the logistic loss. ``regularization`` is the inverse penalty strength, so
larger values fit harder.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize
from sklearn.base import BaseEstimator, ClassifierMixin

from .blob import pack_sections
from .validation import Standardizer, check_binary_labels, check_features


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class LogisticRegression(BaseEstimator, ClassifierMixin):
    def __init__(
        self,
        penalty: str = "l2",
        regularization: float = 1.0,
        tol: float = 1e-8,
        max_iter: int = 500,
    ):
        self.penalty = penalty
        self.regularization = regularization
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        if self.penalty not in ("l1", "l2"):
            raise ValueError(f"penalty must be 'l1' or 'l2', got {self.penalty!r}")
        X = check_features(X)
        y = check_binary_labels(y, X.shape[0])
        self.standardizer_ = Standardizer.fit(X)
        Z = self.standardizer_.transform(X)
        t = 2.0 * y - 1.0
        if self.penalty == "l2":
            w, b = self._fit_l2(Z, t)
        else:
            w, b = self._fit_l1(Z, t)
        self.weights_ = w
        self.intercept_ = b
        return self

    def _fit_l2(self, Z: np.ndarray, t: np.ndarray):
        n, d = Z.shape
        lam = 1.0 / self.regularization

        def objective(theta):
            w, b = theta[:d], theta[d]
            margins = t * (Z @ w + b)
            loss = np.logaddexp(0.0, -margins).sum() + 0.5 * lam * w @ w
            residual = -t * _sigmoid(-margins)
            grad = np.concatenate([Z.T @ residual + lam * w, [residual.sum()]])
            return loss, grad

        result = minimize(
            objective,
            np.zeros(d + 1),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": self.max_iter, "ftol": self.tol, "gtol": 1e-8},
        )
        return result.x[:d], float(result.x[d])

    def _fit_l1(self, Z: np.ndarray, t: np.ndarray):
        n, d = Z.shape
        lam = 1.0 / self.regularization
        w = np.zeros(d)
        b = 0.0
        z = np.zeros(n)  # running decision values Z @ w + b
        curvature = 0.25 * (Z**2).sum(axis=0) + 1e-12
        for _ in range(self.max_iter):
            shift = 0.0
            for j in range(d):
                residual = -t * _sigmoid(-t * z)
                grad_j = Z[:, j] @ residual
                raw = w[j] - grad_j / curvature[j]
                new = np.sign(raw) * max(abs(raw) - lam / curvature[j], 0.0)
                if new != w[j]:
                    z += (new - w[j]) * Z[:, j]
                    shift = max(shift, abs(new - w[j]))
                    w[j] = new
            residual = -t * _sigmoid(-t * z)
            step_b = -residual.sum() / (0.25 * n)
            b += step_b
            z += step_b
            shift = max(shift, abs(step_b))
            if shift < 1e-7:
                break
        return w, b

    def decision_function(self, X) -> np.ndarray:
        Z = self.standardizer_.transform(check_features(X))
        return Z @ self.weights_ + self.intercept_

    def predict_score(self, X) -> np.ndarray:
        """Probability of the positive class."""
        return _sigmoid(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_score(X) >= 0.5).astype(np.int64)

    def to_blob(self) -> bytes:
        return pack_sections(
            "LR",
            [("weights", self.weights_), ("bias", np.array([self.intercept_]))],
        )
