"""Kernel SVR / SVC trained with a sequential minimal optimization solver.

Both estimators share one generic SMO core that minimizes
``0.5 aᵀQa + pᵀa`` subject to ``0 <= a <= box`` and ``yᵀa = 0`` with
``Q = (y yᵀ) ∘ K``; regression is posed as the usual doubled problem over
(alpha, alpha*). Working pairs are chosen by the maximal-violating-pair rule,
which is deterministic, so identical inputs always produce identical models.

Features and targets are standardized before kernel evaluation; the epsilon
tube of the regressor therefore lives in standardized target units.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import json
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils import check_array, check_X_y
from sklearn.utils.validation import check_is_fitted

KERNELS = ("linear", "polynomial", "gaussian")

# Search bounds for hyperparameter optimization.
KERNEL_SCALE_BOUNDS = (1e-2, 1e3)
BOX_BOUNDS = (1e-3, 1e3)
EPSILON_BOUNDS = (1e-3, 1.0)

_TAU = 1e-12  # floor for near-singular two-variable subproblems


@dataclass(frozen=True)
class HyperParams:
    """One point of the hyperparameter space (epsilon only for regression)."""

    kernel: str
    kernel_scale: float
    box_constraint: float
    epsilon: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kernel_scale", float(self.kernel_scale))
        object.__setattr__(self, "box_constraint", float(self.box_constraint))
        if self.epsilon is not None:
            object.__setattr__(self, "epsilon", float(self.epsilon))
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if not KERNEL_SCALE_BOUNDS[0] <= self.kernel_scale <= KERNEL_SCALE_BOUNDS[1]:
            raise ValueError("kernel_scale outside search bounds")
        if not BOX_BOUNDS[0] <= self.box_constraint <= BOX_BOUNDS[1]:
            raise ValueError("box_constraint outside search bounds")
        if self.epsilon is not None and not (
            EPSILON_BOUNDS[0] <= self.epsilon <= EPSILON_BOUNDS[1]
        ):
            raise ValueError("epsilon outside search bounds")

    def as_dict(self) -> dict:
        out = {
            "kernel": self.kernel,
            "kernel_scale": self.kernel_scale,
            "box_constraint": self.box_constraint,
        }
        if self.epsilon is not None:
            out["epsilon"] = self.epsilon
        return out


def kernel_value(kernel: str, kernel_scale: float, x, z) -> float:
    """Kernel between two vectors; see ``kernel_matrix`` for the formulas."""
    x = np.asarray(x, dtype=float).ravel()
    z = np.asarray(z, dtype=float).ravel()
    if x.shape != z.shape:
        raise ValueError("kernel arguments must have equal dimension")
    return float(kernel_matrix(kernel, kernel_scale, x[None, :], z[None, :])[0, 0])


def kernel_matrix(kernel: str, kernel_scale: float, X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Gram matrix K[i, j] = k(X[i], Z[j]).

    linear:     (x.z) / scale
    polynomial: (1 + (x.z) / scale)^3
    gaussian:   exp(-|x - z|^2 / scale^2)
    """
    if kernel_scale <= 0:
        raise ValueError("kernel_scale must be positive")
    if X.shape[1] != Z.shape[1]:
        raise ValueError("kernel arguments must have equal dimension")
    if kernel == "linear":
        return (X @ Z.T) / kernel_scale
    if kernel == "polynomial":
        return (1.0 + (X @ Z.T) / kernel_scale) ** 3
    if kernel == "gaussian":
        sq = (
            np.sum(X * X, axis=1)[:, None]
            + np.sum(Z * Z, axis=1)[None, :]
            - 2.0 * (X @ Z.T)
        )
        np.clip(sq, 0.0, None, out=sq)
        return np.exp(-sq / kernel_scale**2)
    raise ValueError(f"unknown kernel {kernel!r}")


@dataclass(frozen=True)
class Standardizer:
    """Per-feature and target location/scale fitted on the training set."""

    feature_mean: np.ndarray
    feature_sd: np.ndarray
    target_mean: float = 0.0
    target_sd: float = 1.0

    @classmethod
    def fit(cls, X: np.ndarray, y: Optional[np.ndarray] = None) -> "Standardizer":
        mean = X.mean(axis=0)
        sd = X.std(axis=0)
        if y is None:
            return cls(mean, sd)
        return cls(mean, sd, float(np.mean(y)), float(np.std(y)))

    def _divisors(self) -> np.ndarray:
        # zero-variance columns are centered to 0, then divided by 1
        return np.where(self.feature_sd > 0, self.feature_sd, 1.0)

    def apply_features(self, X: np.ndarray) -> np.ndarray:
        return (X - self.feature_mean) / self._divisors()

    def apply_targets(self, y: np.ndarray) -> np.ndarray:
        return (y - self.target_mean) / (self.target_sd if self.target_sd > 0 else 1.0)

    def destandardize_targets(self, z: np.ndarray) -> np.ndarray:
        return z * (self.target_sd if self.target_sd > 0 else 1.0) + self.target_mean

    def to_dict(self) -> dict:
        return {
            "feature_mean": self.feature_mean.tolist(),
            "feature_sd": self.feature_sd.tolist(),
            "target_mean": self.target_mean,
            "target_sd": self.target_sd,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Standardizer":
        return cls(
            np.array(data["feature_mean"], dtype=float),
            np.array(data["feature_sd"], dtype=float),
            float(data["target_mean"]),
            float(data["target_sd"]),
        )


def _solve_smo(qmat, y, p, box, tol, max_iter):
    """Generic SMO loop; returns (a, rho, n_iter, converged).

    ``qmat`` is the full dual Hessian with label signs folded in,
    Q = (y yᵀ) ∘ K. Working pairs follow the maximal-violating-pair rule;
    the loop stops when the maximal KKT violation drops below ``tol`` or
    after ``max_iter`` pair updates. The up/low selection masks only change
    at the two updated coordinates, so they are maintained incrementally.
    """
    m = y.size
    a = np.zeros(m)
    grad = p.astype(float).copy()
    positive = y > 0.0
    # i candidates: alpha can grow along +y; j candidates: shrink along -y
    up_mask = positive.copy()
    low_mask = ~positive
    ygrad = np.empty(m)
    up_vals = np.empty(m)
    low_vals = np.empty(m)
    tmp = np.empty(m)
    n_iter = 0
    converged = False

    def refresh_masks(k: int) -> None:
        if positive[k]:
            up_mask[k] = a[k] < box
            low_mask[k] = a[k] > 0.0
        else:
            up_mask[k] = a[k] > 0.0
            low_mask[k] = a[k] < box

    while n_iter < max_iter:
        np.multiply(y, grad, out=ygrad)
        np.negative(ygrad, out=up_vals)
        low_vals[:] = up_vals
        up_vals[~up_mask] = -np.inf
        low_vals[~low_mask] = np.inf
        i = int(np.argmax(up_vals))
        j = int(np.argmin(low_vals))
        if up_vals[i] - low_vals[j] < tol:
            converged = True
            break

        yi = y[i]
        yj = y[j]
        qij = qmat[i, j]
        old_i = a[i]
        old_j = a[j]
        if yi != yj:
            quad = qmat[i, i] + qmat[j, j] + 2.0 * qij
            if quad <= 0.0:
                quad = _TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            ai = old_i + delta
            aj = old_j + delta
            if diff > 0.0:
                if aj < 0.0:
                    aj = 0.0
                    ai = diff
                if ai > box:
                    ai = box
                    aj = box - diff
            else:
                if ai < 0.0:
                    ai = 0.0
                    aj = -diff
                if aj > box:
                    aj = box
                    ai = box + diff
        else:
            quad = qmat[i, i] + qmat[j, j] - 2.0 * qij
            if quad <= 0.0:
                quad = _TAU
            delta = (grad[i] - grad[j]) / quad
            total = old_i + old_j
            ai = old_i - delta
            aj = old_j + delta
            if total > box:
                if ai > box:
                    ai = box
                    aj = total - box
                if aj > box:
                    aj = box
                    ai = total - box
            else:
                if aj < 0.0:
                    aj = 0.0
                    ai = total
                if ai < 0.0:
                    ai = 0.0
                    aj = total
        a[i] = ai
        a[j] = aj
        refresh_masks(i)
        refresh_masks(j)
        np.multiply(qmat[i], ai - old_i, out=tmp)
        grad += tmp
        np.multiply(qmat[j], aj - old_j, out=tmp)
        grad += tmp
        n_iter += 1

    np.multiply(y, grad, out=ygrad)
    free = (a > 0.0) & (a < box)
    if free.any():
        rho = float(ygrad[free].mean())
    else:
        hi = float(-ygrad[up_mask].max()) if up_mask.any() else -np.inf
        lo = float(-ygrad[low_mask].min()) if low_mask.any() else np.inf
        if np.isfinite(hi) and np.isfinite(lo):
            rho = -0.5 * (hi + lo)
        elif np.isfinite(hi):
            rho = -hi
        elif np.isfinite(lo):
            rho = -lo
        else:
            rho = 0.0
    return a, rho, n_iter, converged


class SvmRegressor(RegressorMixin, BaseEstimator):
    """Epsilon-insensitive support vector regression.

    Parameters
    ----------
    kernel : {'linear', 'polynomial', 'gaussian'}
    kernel_scale : float
        Scale of the kernel feature mapping.
    box_constraint : float
        Upper bound on the dual coefficients (regularization).
    epsilon : float
        Half-width of the insensitive tube, in standardized target units.
    tol : float
        KKT violation tolerance at convergence.
    max_iter : int
        Cap on SMO pair updates; hitting it leaves ``converged_`` False.
    """

    def __init__(
        self,
        kernel: str = "gaussian",
        kernel_scale: float = 1.0,
        box_constraint: float = 1.0,
        epsilon: float = 0.1,
        tol: float = 1e-3,
        max_iter: int = 100_000,
    ):
        self.kernel = kernel
        self.kernel_scale = kernel_scale
        self.box_constraint = box_constraint
        self.epsilon = epsilon
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[0] < 2:
            raise ValueError("need at least two training samples")
        if self.box_constraint <= 0 or self.epsilon < 0 or self.tol <= 0:
            raise ValueError("box_constraint and tol must be positive, epsilon >= 0")

        scaler = Standardizer.fit(X, y)
        Xs = scaler.apply_features(X)
        z = scaler.apply_targets(y)
        n = Xs.shape[0]
        kmat = kernel_matrix(self.kernel, self.kernel_scale, Xs, Xs)

        # doubled problem over (alpha, alpha*); Q = (y yᵀ) ∘ K over both blocks
        y_ext = np.concatenate([np.ones(n), -np.ones(n)])
        p_ext = np.concatenate([self.epsilon - z, self.epsilon + z])
        qmat = np.empty((2 * n, 2 * n))
        qmat[:n, :n] = kmat
        qmat[n:, n:] = kmat
        np.negative(kmat, out=qmat[:n, n:])
        qmat[n:, :n] = qmat[:n, n:]

        a, rho, n_iter, converged = _solve_smo(
            qmat, y_ext, p_ext, float(self.box_constraint), self.tol, self.max_iter
        )
        coef = a[:n] - a[n:]
        keep = coef != 0.0

        self.n_features_in_ = X.shape[1]
        self.standardizer_ = scaler
        self.support_vectors_ = Xs[keep]
        self.dual_coef_ = coef[keep]
        self.intercept_ = -rho
        self.n_iter_ = n_iter
        self.converged_ = converged
        return self

    def _decision_standardized(self, Xs: np.ndarray) -> np.ndarray:
        if self.dual_coef_.size == 0:
            return np.full(Xs.shape[0], self.intercept_)
        kmat = kernel_matrix(self.kernel, self.kernel_scale, Xs, self.support_vectors_)
        return kmat @ self.dual_coef_ + self.intercept_

    def predict(self, X):
        check_is_fitted(self, "dual_coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        Xs = self.standardizer_.apply_features(X)
        return self.standardizer_.destandardize_targets(self._decision_standardized(Xs))


class SvmClassifier(ClassifierMixin, BaseEstimator):
    """Soft-margin binary SVC over labels {-1, +1}.

    Shares the SMO core with the regressor; ``predict`` breaks decision ties
    toward +1.
    """

    def __init__(
        self,
        kernel: str = "gaussian",
        kernel_scale: float = 1.0,
        box_constraint: float = 1.0,
        tol: float = 1e-3,
        max_iter: int = 100_000,
    ):
        self.kernel = kernel
        self.kernel_scale = kernel_scale
        self.box_constraint = box_constraint
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        labels = np.unique(y)
        if not np.array_equal(labels, [-1.0, 1.0]):
            raise ValueError("degenerate labels: need both classes, coded -1/+1")
        if self.box_constraint <= 0 or self.tol <= 0:
            raise ValueError("box_constraint and tol must be positive")

        scaler = Standardizer.fit(X)
        Xs = scaler.apply_features(X)
        kmat = kernel_matrix(self.kernel, self.kernel_scale, Xs, Xs)
        qmat = kmat * np.outer(y, y)

        a, rho, n_iter, converged = _solve_smo(
            qmat,
            y,
            -np.ones(Xs.shape[0]),
            float(self.box_constraint),
            self.tol,
            self.max_iter,
        )
        coef = a * y
        keep = a > 0.0

        self.classes_ = np.array([-1.0, 1.0])
        self.n_features_in_ = X.shape[1]
        self.standardizer_ = scaler
        self.support_vectors_ = Xs[keep]
        self.dual_coef_ = coef[keep]
        self.intercept_ = -rho
        self.n_iter_ = n_iter
        self.converged_ = converged
        return self

    def decision_function(self, X):
        check_is_fitted(self, "dual_coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        Xs = self.standardizer_.apply_features(X)
        if self.dual_coef_.size == 0:
            return np.full(Xs.shape[0], self.intercept_)
        kmat = kernel_matrix(self.kernel, self.kernel_scale, Xs, self.support_vectors_)
        return kmat @ self.dual_coef_ + self.intercept_

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0.0, 1.0, -1.0)


def make_regressor(theta: HyperParams, tol: float = 1e-3, max_iter: int = 100_000) -> SvmRegressor:
    if theta.epsilon is None:
        raise ValueError("regression hyperparameters need epsilon")
    return SvmRegressor(
        kernel=theta.kernel,
        kernel_scale=theta.kernel_scale,
        box_constraint=theta.box_constraint,
        epsilon=theta.epsilon,
        tol=tol,
        max_iter=max_iter,
    )


def make_classifier(theta: HyperParams, tol: float = 1e-3, max_iter: int = 100_000) -> SvmClassifier:
    return SvmClassifier(
        kernel=theta.kernel,
        kernel_scale=theta.kernel_scale,
        box_constraint=theta.box_constraint,
        tol=tol,
        max_iter=max_iter,
    )


def model_to_dict(model) -> dict:
    """Self-describing document from which predictions are bit-reproducible."""
    check_is_fitted(model, "dual_coef_")
    kind = "regressor" if isinstance(model, SvmRegressor) else "classifier"
    out = {
        "model": kind,
        "kernel": model.kernel,
        "kernel_scale": model.kernel_scale,
        "box_constraint": model.box_constraint,
        "tol": model.tol,
        "max_iter": model.max_iter,
        "standardizer": model.standardizer_.to_dict(),
        "support_vectors": model.support_vectors_.tolist(),
        "dual_coef": model.dual_coef_.tolist(),
        "intercept": model.intercept_,
        "n_features": model.n_features_in_,
        "converged": bool(model.converged_),
    }
    if kind == "regressor":
        out["epsilon"] = model.epsilon
    return out


def model_from_dict(data: dict):
    if data["model"] == "regressor":
        model = SvmRegressor(
            kernel=data["kernel"],
            kernel_scale=data["kernel_scale"],
            box_constraint=data["box_constraint"],
            epsilon=data["epsilon"],
            tol=data["tol"],
            max_iter=data["max_iter"],
        )
    else:
        model = SvmClassifier(
            kernel=data["kernel"],
            kernel_scale=data["kernel_scale"],
            box_constraint=data["box_constraint"],
            tol=data["tol"],
            max_iter=data["max_iter"],
        )
        model.classes_ = np.array([-1.0, 1.0])
    model.standardizer_ = Standardizer.from_dict(data["standardizer"])
    model.support_vectors_ = np.array(data["support_vectors"], dtype=float).reshape(
        len(data["dual_coef"]), data["n_features"]
    )
    model.dual_coef_ = np.array(data["dual_coef"], dtype=float)
    model.intercept_ = float(data["intercept"])
    model.n_features_in_ = int(data["n_features"])
    model.converged_ = bool(data["converged"])
    model.n_iter_ = -1
    return model


def save_model(model, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True, indent=2)


def load_model(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))
