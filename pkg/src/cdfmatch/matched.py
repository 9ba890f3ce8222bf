"""Estimator front end: hyperparameter search under the composite loss.

``fit`` builds the target CDF (from the training targets unless one is
supplied), freezes one set of evaluation inputs, searches the hyperparameter
space for the best composite loss, and refits the winning model. The result
is a plain sklearn-style estimator whose behavior is reproducible from
``random_state``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils import check_X_y
from sklearn.utils.validation import check_is_fitted

from .distributions import sample
from .ecdf import ecdf_build
from .hpo import DEFAULT_BUDGET, SearchSpace, optimize
from .losses import (
    LossWeights,
    ObjectiveConfig,
    evaluate_objective,
    evaluate_objective_classification,
)
from .rng import RngStream, derive_stream
from .svm import KERNELS, make_classifier, make_regressor

_MIN_EVAL_ROWS = 100


def _frozen_eval_inputs(X: np.ndarray) -> np.ndarray:
    """Training rows tiled up to the minimum evaluation size.

    Tiling repeats every row the same number of times, so the empirical CDF
    of predictions over the tiled set equals the CDF over the original rows.
    """
    if X.shape[0] >= _MIN_EVAL_ROWS:
        return X
    reps = -(-_MIN_EVAL_ROWS // X.shape[0])
    return np.tile(X, (reps, 1))


class _MatchedBase(BaseEstimator):
    def _search(self, X, y, objective_fn, space, target_cdf):
        rng = RngStream(self.random_state)
        if self.input_dist is not None:
            eval_inputs = sample(self.input_dist, self.mc_samples, derive_stream(rng, 0))
        else:
            eval_inputs = _frozen_eval_inputs(X)
        cfg = ObjectiveConfig(
            weights=LossWeights(self.alpha, self.beta, self.gamma),
            target_cdf=target_cdf,
            distance=self.distance,
            mc_samples=eval_inputs.shape[0],
            grid_size=self.grid_size,
            residual=self.residual,
            frozen_mc_inputs=eval_inputs,
            tol=self.tol,
            max_iter=self.max_iter,
        )
        eval_rng = derive_stream(rng, 1)  # unused with frozen inputs; kept for API symmetry
        result = optimize(
            lambda theta: objective_fn(theta, (X, y), cfg, eval_rng),
            space,
            budget=self.budget,
            strategy=self.strategy,
            rng=derive_stream(rng, 2),
        )
        self.target_cdf_ = target_cdf
        self.eval_inputs_ = eval_inputs
        self.result_ = result
        self.best_params_ = result.best_theta
        return result


class DistributionMatchedSVR(RegressorMixin, _MatchedBase):
    """SVR tuned to balance training error against CDF alignment.

    Parameters mirror the composite loss: ``alpha`` weights the mean squared
    error, ``beta`` the CDF distance of the predictions over the evaluation
    inputs (the training rows, or draws from ``input_dist`` when given).
    """

    def __init__(
        self,
        alpha: float = 0.3,
        beta: float = 0.7,
        gamma: float = 0.0,
        distance: str = "bhattacharyya",
        kernels=KERNELS,
        budget: int = DEFAULT_BUDGET,
        strategy: str = "smbo",
        mc_samples: int = 10_000,
        grid_size: int = 100,
        input_dist=None,
        residual=None,
        tol: float = 1e-3,
        max_iter: int = 100_000,
        random_state: int = 0,
    ):
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.distance = distance
        self.kernels = kernels
        self.budget = budget
        self.strategy = strategy
        self.mc_samples = mc_samples
        self.grid_size = grid_size
        self.input_dist = input_dist
        self.residual = residual
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y, target_cdf=None):
        X, y = check_X_y(X, y, y_numeric=True)
        target = target_cdf if target_cdf is not None else ecdf_build(y, "linear")
        self._search(X, y, evaluate_objective, SearchSpace.regression(self.kernels), target)
        self.model_ = make_regressor(
            self.best_params_, tol=self.tol, max_iter=self.max_iter
        ).fit(X, y)
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.predict(X)


class DistributionMatchedSVC(ClassifierMixin, _MatchedBase):
    """Binary SVC (labels 0/1) tuned under error rate plus label-CDF distance."""

    def __init__(
        self,
        alpha: float = 0.3,
        beta: float = 0.7,
        distance: str = "bhattacharyya",
        kernels=KERNELS,
        budget: int = DEFAULT_BUDGET,
        strategy: str = "smbo",
        grid_size: int = 100,
        tol: float = 1e-3,
        max_iter: int = 100_000,
        random_state: int = 0,
    ):
        self.alpha = alpha
        self.beta = beta
        self.distance = distance
        self.kernels = kernels
        self.budget = budget
        self.strategy = strategy
        self.grid_size = grid_size
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    # attributes consumed by _MatchedBase._search
    gamma = 0.0
    mc_samples = 10_000
    input_dist = None
    residual = None

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        labels = np.unique(y)
        if not np.array_equal(labels, [0, 1]):
            raise ValueError("labels must be 0/1 with both classes present")
        self._search(
            X,
            y.astype(float),
            evaluate_objective_classification,
            SearchSpace.classification(self.kernels),
            None,
        )
        self.classes_ = np.array([0, 1])
        self.model_ = make_classifier(
            self.best_params_, tol=self.tol, max_iter=self.max_iter
        ).fit(X, 2.0 * y.astype(float) - 1.0)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        return self.model_.decision_function(X)

    def predict(self, X):
        return (self.decision_function(X) >= 0.0).astype(int)
