"""Kernel SVM trained by sequential minimal optimization, with Platt
scaling so that scores land in [0, 1].

The optimizer is Platt's two-loop SMO: full sweeps alternate with sweeps
over non-bound multipliers until a full sweep changes nothing, which
leaves every KKT violation below ``tol``. Kernel values are computed on
demand (no Gram cache); an error cache is updated incrementally with the
two touched kernel columns.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .blob import pack_sections
from .validation import Standardizer, check_binary_labels, check_features

_KERNEL_IDS = {"rbf": 0, "poly": 1, "sigmoid": 2}
_STEP_EPS = 1e-12


def _fit_platt(decision: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Newton fit of P(y=1|f) = 1 / (1 + exp(A f + B)) with the usual
    prior-corrected targets."""
    prior1 = float(np.sum(y == 1))
    prior0 = float(y.size - prior1)
    target = np.where(y == 1, (prior1 + 1.0) / (prior1 + 2.0), 1.0 / (prior0 + 2.0))
    A, B = 0.0, np.log((prior0 + 1.0) / (prior1 + 1.0))
    sigma = 1e-12

    def value(a, b):
        fab = decision * a + b
        return float(
            np.sum(np.where(fab >= 0, target * fab, (target - 1.0) * fab))
            + np.sum(np.logaddexp(0.0, -np.abs(fab)))
        )

    fval = value(A, B)
    for _ in range(100):
        fab = decision * A + B
        p = np.where(fab >= 0, np.exp(-fab), 1.0) / (1.0 + np.exp(-np.abs(fab)))
        q = 1.0 - p
        d1 = target - p
        d2 = p * q
        g1 = float(np.sum(decision * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        h11 = float(np.sum(decision * decision * d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.sum(decision * d2))
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= 1e-10:
            new_a, new_b = A + step * dA, B + step * dB
            new_f = value(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                A, B, fval = new_a, new_b, new_f
                break
            step /= 2.0
        else:
            break
    return A, B


class SupportVectorMachine(BaseEstimator, ClassifierMixin):
    def __init__(
        self,
        regularization: float = 1.0,
        kernel: str = "rbf",
        kernel_coefficient: float = 0.1,
        degree: int = 3,
        tol: float = 1e-3,
        max_passes: int = 10_000,
    ):
        self.regularization = regularization
        self.kernel = kernel
        self.kernel_coefficient = kernel_coefficient
        self.degree = degree
        self.tol = tol
        self.max_passes = max_passes

    # -- kernels -----------------------------------------------------------
    def _kernel(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        gamma = self.kernel_coefficient
        if self.kernel == "rbf":
            a2 = np.sum(A**2, axis=1)[:, None]
            b2 = np.sum(B**2, axis=1)[None, :]
            sq = np.maximum(a2 + b2 - 2.0 * (A @ B.T), 0.0)
            return np.exp(-gamma * sq)
        if self.kernel == "poly":
            return (gamma * (A @ B.T)) ** self.degree
        if self.kernel == "sigmoid":
            return np.tanh(gamma * (A @ B.T))
        raise ValueError(f"unknown kernel {self.kernel!r}")

    def _column(self, i: int) -> np.ndarray:
        return self._kernel(self._Z, self._Z[i : i + 1]).ravel()

    # -- SMO ---------------------------------------------------------------
    def _take_step(self, i1: int, i2: int, k2: np.ndarray) -> bool:
        if i1 == i2:
            return False
        alpha, t, err, C = self._alpha, self._t, self._err, self.regularization
        a1, a2 = alpha[i1], alpha[i2]
        t1, t2 = t[i1], t[i2]
        s = t1 * t2
        if s > 0:
            lo, hi = max(0.0, a1 + a2 - C), min(C, a1 + a2)
        else:
            lo, hi = max(0.0, a2 - a1), min(C, C + a2 - a1)
        if lo >= hi:
            return False
        k1 = self._column(i1)
        k11, k22, k12 = k1[i1], k2[i2], k1[i2]
        eta = k11 + k22 - 2.0 * k12
        e1, e2 = err[i1], err[i2]
        if eta > _STEP_EPS:
            a2_new = a2 + t2 * (e1 - e2) / eta
            a2_new = min(max(a2_new, lo), hi)
        else:
            # flat or concave direction: compare the dual objective at the
            # two clip ends and move to the better one
            def dual_gain(cand):
                d2 = cand - a2
                d1 = -s * d2
                quad = d1 * d1 * k11 + d2 * d2 * k22 + 2.0 * d1 * d2 * s * k12
                lin1 = e1 + t1 - self._b  # f(i1) without the threshold
                lin2 = e2 + t2 - self._b
                return d1 + d2 - 0.5 * quad - d1 * t1 * lin1 - d2 * t2 * lin2

            gain_lo, gain_hi = dual_gain(lo), dual_gain(hi)
            if gain_lo > gain_hi + _STEP_EPS:
                a2_new = lo
            elif gain_hi > gain_lo + _STEP_EPS:
                a2_new = hi
            else:
                return False
        if abs(a2_new - a2) < _STEP_EPS * (a2_new + a2 + _STEP_EPS):
            return False
        a1_new = a1 + s * (a2 - a2_new)
        d1, d2 = a1_new - a1, a2_new - a2
        b1 = self._b - e1 - t1 * d1 * k11 - t2 * d2 * k12
        b2 = self._b - e2 - t1 * d1 * k12 - t2 * d2 * k22
        if 0.0 < a1_new < C:
            b_new = b1
        elif 0.0 < a2_new < C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)
        self._err += t1 * d1 * k1 + t2 * d2 * k2 + (b_new - self._b)
        alpha[i1], alpha[i2] = a1_new, a2_new
        self._b = b_new
        return True

    def _examine(self, i2: int) -> int:
        alpha, t, err, C = self._alpha, self._t, self._err, self.regularization
        r2 = err[i2] * t[i2]
        if not ((r2 < -self.tol and alpha[i2] < C) or (r2 > self.tol and alpha[i2] > 0)):
            return 0
        k2 = self._column(i2)
        non_bound = np.flatnonzero((alpha > 0.0) & (alpha < C))
        if non_bound.size > 1:
            i1 = int(non_bound[np.argmax(np.abs(err[non_bound] - err[i2]))])
            if self._take_step(i1, i2, k2):
                return 1
        for i1 in non_bound:
            if self._take_step(int(i1), i2, k2):
                return 1
        for i1 in range(alpha.size):
            if self._take_step(i1, i2, k2):
                return 1
        return 0

    def fit(self, X, y):
        X = check_features(X)
        y = check_binary_labels(y, X.shape[0])
        self.standardizer_ = Standardizer.fit(X)
        self._Z = self.standardizer_.transform(X)
        self._t = (2.0 * y - 1.0).astype(np.float64)
        n = X.shape[0]
        self._alpha = np.zeros(n)
        self._b = 0.0
        self._err = -self._t.copy()  # f = 0 everywhere at the start

        examine_all = True
        for _ in range(self.max_passes):
            if examine_all:
                targets = range(n)
            else:
                targets = np.flatnonzero(
                    (self._alpha > 0.0) & (self._alpha < self.regularization)
                )
            changed = sum(self._examine(int(i)) for i in targets)
            if examine_all:
                if changed == 0:
                    break
                examine_all = False
            elif changed == 0:
                examine_all = True

        decision = self._err + self._t  # f values on the training set
        margins = self._t * decision - 1.0
        at_zero = self._alpha <= 1e-9
        at_c = self._alpha >= self.regularization - 1e-9
        violation = np.where(
            at_zero,
            np.maximum(0.0, -margins),
            np.where(at_c, np.maximum(0.0, margins), np.abs(margins)),
        )
        self.kkt_violation_ = float(violation.max())

        keep = self._alpha > 1e-12
        self.support_vectors_ = self._Z[keep]
        self.dual_coef_ = (self._alpha * self._t)[keep]
        self.intercept_ = self._b
        self.platt_ = _fit_platt(decision, y)
        del self._Z, self._t, self._alpha, self._err, self._b
        return self

    # -- inference ---------------------------------------------------------
    def decision_function(self, X) -> np.ndarray:
        Z = self.standardizer_.transform(check_features(X))
        if self.support_vectors_.shape[0] == 0:
            return np.full(Z.shape[0], self.intercept_)
        return self._kernel(Z, self.support_vectors_) @ self.dual_coef_ + self.intercept_

    def predict_score(self, X) -> np.ndarray:
        """Platt-calibrated probability of the positive class."""
        A, B = self.platt_
        fab = self.decision_function(X) * A + B
        return np.where(fab >= 0, np.exp(-fab), 1.0) / (1.0 + np.exp(-np.abs(fab)))

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0.0).astype(np.int64)

    def to_blob(self) -> bytes:
        return pack_sections(
            "SVM",
            [
                ("support_vectors", self.support_vectors_),
                ("dual_coef", self.dual_coef_),
                ("intercept", np.array([self.intercept_])),
                ("calibration", np.array(self.platt_)),
                (
                    "kernel",
                    np.array(
                        [
                            _KERNEL_IDS[self.kernel],
                            self.kernel_coefficient,
                            self.degree,
                        ]
                    ),
                ),
            ],
        )
