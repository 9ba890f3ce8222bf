"""Composite objective: pointwise data loss plus a CDF-distance penalty.

``evaluate_objective`` performs one full evaluation for a hyperparameter
point: train the model, measure training error, push Monte Carlo inputs
through the model, build the predicted CDF, and measure its distance to the
target CDF. With ``frozen_mc_inputs`` set, every evaluation sees the same
input rows (common random numbers), so objective differences across
hyperparameters are not polluted by sampling noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .distributions import InputDistribution, sample
from .divergence import distance, normalize_kind
from .ecdf import EmpiricalCdf, ecdf_build, make_grid
from .rng import RngStream
from .svm import HyperParams, make_classifier, make_regressor


@dataclass(frozen=True)
class LossWeights:
    """Weights of the data, probabilistic, and physics terms."""

    alpha: float
    beta: float
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0 or self.gamma < 0:
            raise ValueError("loss weights must be non-negative")
        if self.alpha + self.beta <= 0:
            raise ValueError("alpha + beta must be positive")


@dataclass(frozen=True)
class LossBreakdown:
    data_loss: float
    prob_loss: float
    physics_loss: float
    total: float
    rmse: float

    @classmethod
    def combine(
        cls, weights: LossWeights, data: float, prob: float, physics: float = 0.0
    ) -> "LossBreakdown":
        total = weights.alpha * data + weights.beta * prob + weights.gamma * physics
        return cls(data, prob, physics, total, math.sqrt(data))

    @classmethod
    def failed(cls) -> "LossBreakdown":
        nan = float("nan")
        return cls(nan, nan, nan, float("inf"), nan)

    def to_dict(self) -> dict:
        return {
            "data_loss": self.data_loss,
            "prob_loss": self.prob_loss,
            "physics_loss": self.physics_loss,
            "total": self.total,
            "rmse": self.rmse,
        }


@dataclass(frozen=True)
class ObjectiveConfig:
    """Everything one objective evaluation needs besides the model itself."""

    weights: LossWeights
    target_cdf: Optional[EmpiricalCdf] = None
    input_dist: Optional[InputDistribution] = None
    distance: str = "bhattacharyya"
    mc_samples: int = 10_000
    grid_size: int = 100
    residual: Optional[Callable] = None
    frozen_mc_inputs: Optional[np.ndarray] = field(default=None, compare=False)
    cdf_interpolation: str = "linear"
    classification_cdf: str = "labels"  # or "margins"
    tol: float = 1e-3
    max_iter: int = 100_000

    def __post_init__(self) -> None:
        normalize_kind(self.distance)
        if self.mc_samples < 100:
            raise ValueError("mc_samples must be >= 100")
        if self.frozen_mc_inputs is not None:
            frozen = np.asarray(self.frozen_mc_inputs, dtype=float)
            if frozen.shape[0] != self.mc_samples:
                raise ValueError("frozen_mc_inputs row count must equal mc_samples")
            object.__setattr__(self, "frozen_mc_inputs", frozen)
        if self.classification_cdf not in ("labels", "margins"):
            raise ValueError(f"unknown classification_cdf {self.classification_cdf!r}")


def data_loss(y_true, y_pred) -> float:
    """Mean squared error over paired samples."""
    y_true = np.asarray(y_true, dtype=float).ravel()
    y_pred = np.asarray(y_pred, dtype=float).ravel()
    if y_true.size == 0 or y_true.shape != y_pred.shape:
        raise ValueError("inputs must be equal-length non-empty vectors")
    return float(np.mean((y_true - y_pred) ** 2))


def physics_loss(residual: Optional[Callable], X, y_pred) -> float:
    """Mean squared residual norm; 0 when no residual is configured."""
    if residual is None:
        return 0.0
    values = np.asarray(residual(np.asarray(y_pred, dtype=float), np.asarray(X, dtype=float)))
    if not np.all(np.isfinite(values)):
        raise ValueError("residual returned non-finite values")
    if values.ndim == 1:
        return float(np.mean(values**2))
    return float(np.mean(np.sum(values**2, axis=tuple(range(1, values.ndim)))))


def _evaluation_inputs(cfg: ObjectiveConfig, rng: RngStream, fallback: Optional[np.ndarray] = None):
    if cfg.frozen_mc_inputs is not None:
        return cfg.frozen_mc_inputs
    if cfg.input_dist is not None:
        return sample(cfg.input_dist, cfg.mc_samples, rng)
    if fallback is not None:
        return fallback
    raise ValueError("need frozen_mc_inputs or input_dist to build the predicted CDF")


def _predicted_cdf(model_predict, inputs, interpolation: str) -> EmpiricalCdf:
    outputs = np.asarray(model_predict(inputs), dtype=float).ravel()
    bad = int(np.count_nonzero(~np.isfinite(outputs)))
    if bad:
        raise ValueError(f"model produced {bad} non-finite predictions")
    return ecdf_build(outputs, interpolation=interpolation)


def evaluate_objective(
    theta: HyperParams, train: tuple, cfg: ObjectiveConfig, rng: RngStream
) -> LossBreakdown:
    """Train the regressor for ``theta`` and score the composite loss."""
    X, y = train
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    model = make_regressor(theta, tol=cfg.tol, max_iter=cfg.max_iter).fit(X, y)
    pred_train = model.predict(X)
    data = data_loss(y, pred_train)
    physics = physics_loss(cfg.residual, X, pred_train)

    prob = 0.0
    if cfg.weights.beta > 0:
        if cfg.target_cdf is None:
            raise ValueError("target_cdf is required when beta > 0")
        inputs = _evaluation_inputs(cfg, rng, fallback=X)
        predicted = _predicted_cdf(model.predict, inputs, cfg.cdf_interpolation)
        grid = make_grid(cfg.target_cdf, predicted, cfg.grid_size)
        prob = distance(cfg.distance, cfg.target_cdf, predicted, grid)
    return LossBreakdown.combine(cfg.weights, data, prob, physics)


def evaluate_objective_classification(
    theta: HyperParams, train: tuple, cfg: ObjectiveConfig, rng: RngStream
) -> LossBreakdown:
    """Classifier variant: error rate plus a label-CDF distance.

    Labels are 0/1. The predicted-label CDF on the evaluation inputs is
    compared against the training-label CDF; with
    ``classification_cdf='margins'`` raw decision values are compared against
    the +-1 coded label CDF instead.
    """
    X, labels = train
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=float).ravel()
    model = make_classifier(theta, tol=cfg.tol, max_iter=cfg.max_iter).fit(
        X, 2.0 * labels - 1.0
    )
    pred_train = (model.predict(X) + 1.0) / 2.0
    data = float(np.mean(pred_train != labels))

    prob = 0.0
    if cfg.weights.beta > 0:
        inputs = _evaluation_inputs(cfg, rng, fallback=X)
        if cfg.classification_cdf == "labels":
            target = cfg.target_cdf or ecdf_build(labels, interpolation="step")
            pred_eval = (model.predict(inputs) + 1.0) / 2.0
            predicted = ecdf_build(pred_eval, interpolation="step")
        else:
            target = cfg.target_cdf or ecdf_build(2.0 * labels - 1.0, interpolation="step")
            predicted = _predicted_cdf(model.decision_function, inputs, "linear")
        grid = make_grid(target, predicted, cfg.grid_size)
        prob = distance(cfg.distance, target, predicted, grid)
    return LossBreakdown.combine(cfg.weights, data, prob, 0.0)
