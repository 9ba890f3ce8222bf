"""Structural-health-monitoring pipeline on synthetic damage data.

The damage level is a noisy linear function of five operating parameters,
clamped to [0, 100]. The target CDF comes from the observed training outputs;
the searched regimes then compete on fresh inputs drawn from the same
parameter ranges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..distributions import InputDistribution, Marginal, sample
from ..divergence import distance
from ..ecdf import ecdf_build, make_grid
from ..hpo import DEFAULT_BUDGET, SearchSpace, baseline_theta, optimize
from ..losses import LossBreakdown, LossWeights, ObjectiveConfig, evaluate_objective
from ..metrics import rmse
from ..rng import RngStream, derive_stream
from ..svm import make_regressor
from .common import (
    REGIME_BASELINE,
    REGIME_PROB,
    REGIME_RMSE,
    ExperimentReport,
    RegimeReport,
    fingerprint,
    persist_opt_result,
    write_csv,
)

# (lower, upper) per input: vibration frequency, strain, displacement,
# temperature, loading
SHM_RANGES = ((10.0, 30.0), (50.0, 200.0), (0.5, 2.0), (20.0, 60.0), (10.0, 100.0))
SHM_COEFFICIENTS = (0.5, 0.3, -0.2, 0.1, 0.05)
DAMAGE_BOUNDS = (0.0, 100.0)


@dataclass(frozen=True)
class ShmConfig:
    n_samples: int = 400
    noise_sd: float = 10.0
    ranges: tuple = SHM_RANGES
    coefficients: tuple = SHM_COEFFICIENTS
    bias: float = 0.0
    weights: LossWeights = field(default_factory=lambda: LossWeights(0.3, 0.7))
    distance: str = "bhattacharyya"
    budget: int = DEFAULT_BUDGET
    strategy: str = "smbo"
    mc_samples: int = 10_000
    grid_size: int = 100
    test_samples: int = 10_000
    tol: float = 1e-3
    max_iter: int = 100_000

    def input_distribution(self) -> InputDistribution:
        return InputDistribution([Marginal.uniform(lo, hi) for lo, hi in self.ranges])

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "noise_sd": self.noise_sd,
            "ranges": [list(r) for r in self.ranges],
            "coefficients": list(self.coefficients),
            "bias": self.bias,
            "alpha": self.weights.alpha,
            "beta": self.weights.beta,
            "gamma": self.weights.gamma,
            "distance": self.distance,
            "budget": self.budget,
            "strategy": self.strategy,
            "mc_samples": self.mc_samples,
            "grid_size": self.grid_size,
            "test_samples": self.test_samples,
        }


def shm_response(cfg: ShmConfig, X: np.ndarray, noise: np.ndarray) -> np.ndarray:
    damage = X @ np.asarray(cfg.coefficients) + cfg.bias + noise
    return np.clip(damage, *DAMAGE_BOUNDS)


def shm_generate(cfg: ShmConfig, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Synthesize (X, damage) with measurement noise of sd ``cfg.noise_sd``."""
    X = sample(cfg.input_distribution(), cfg.n_samples, derive_stream(rng, 0))
    if cfg.noise_sd > 0:
        noise = derive_stream(rng, 1).generator().normal(0.0, cfg.noise_sd, cfg.n_samples)
    else:
        noise = np.zeros(cfg.n_samples)
    return X, shm_response(cfg, X, noise)


def run_shm(cfg: ShmConfig, rng: RngStream, out_dir: Optional[Path] = None) -> ExperimentReport:
    X, y = shm_generate(cfg, derive_stream(rng, 0))
    target = ecdf_build(y, interpolation="linear")
    dist = cfg.input_distribution()
    frozen = sample(dist, cfg.mc_samples, derive_stream(rng, 1))

    def objective_config(weights: LossWeights) -> ObjectiveConfig:
        return ObjectiveConfig(
            weights=weights,
            target_cdf=target,
            distance=cfg.distance,
            mc_samples=cfg.mc_samples,
            grid_size=cfg.grid_size,
            frozen_mc_inputs=frozen,
            tol=cfg.tol,
            max_iter=cfg.max_iter,
        )

    space = SearchSpace.regression()
    opt_rng = derive_stream(rng, 2)
    eval_rng = derive_stream(rng, 3)  # unused while inputs stay frozen

    def search(weights: LossWeights):
        return optimize(
            lambda theta: evaluate_objective(theta, (X, y), objective_config(weights), eval_rng),
            space,
            budget=cfg.budget,
            strategy=cfg.strategy,
            rng=opt_rng,
        )

    rmse_result = search(LossWeights(1.0, 0.0))
    prob_result = search(cfg.weights)
    base_theta = baseline_theta((X, y), task="regression")

    # fresh evaluation draw, never seen by any regime
    X_test = sample(dist, cfg.test_samples, derive_stream(rng, 4))
    test_noise = derive_stream(rng, 5).generator().normal(0.0, cfg.noise_sd, cfg.test_samples)
    y_test = shm_response(cfg, X_test, test_noise)

    report = ExperimentReport(name="shm", config=cfg.to_dict())
    regimes = {
        REGIME_BASELINE: (base_theta, None),
        REGIME_RMSE: (rmse_result.best_theta, rmse_result),
        REGIME_PROB: (prob_result.best_theta, prob_result),
    }
    for name, (theta, result) in regimes.items():
        model = make_regressor(theta, tol=cfg.tol, max_iter=cfg.max_iter).fit(X, y)
        pred_train = model.predict(X)
        pred_test = model.predict(X_test)
        predicted_cdf = ecdf_build(pred_test, interpolation="linear")
        grid = make_grid(target, predicted_cdf, cfg.grid_size)
        regime = RegimeReport(
            name=name,
            theta=theta,
            train_metrics={"rmse": rmse(y, pred_train)},
            test_metrics={"rmse": rmse(y_test, pred_test)},
            cdf_distance_fresh=distance(cfg.distance, target, predicted_cdf, grid),
            best_loss=result.best_loss if result else None,
            n_trials=len(result.history) if result else 0,
        )
        report.regimes[name] = regime
        if out_dir is not None:
            regime_dir = Path(out_dir) / name
            regime_dir.mkdir(parents=True, exist_ok=True)
            predicted_cdf.to_csv(regime_dir / "cdf_predicted.csv")
            if result is not None:
                persist_opt_result(regime_dir, result)

    train_rmses = {n: r.train_metrics["rmse"] for n, r in report.regimes.items()}
    report.verdicts = {
        "rmse_regime_has_lowest_training_rmse": train_rmses[REGIME_RMSE]
        == min(train_rmses.values()),
        "prob_regime_beats_rmse_regime_on_fresh_cdf_distance": (
            report.regimes[REGIME_PROB].cdf_distance_fresh
            < report.regimes[REGIME_RMSE].cdf_distance_fresh
        ),
    }
    report.invariants = {
        "searched_regimes_share_budget": len(rmse_result.history) == len(prob_result.history),
        "loss_decomposition_exact": _decomposition_exact(rmse_result, LossWeights(1.0, 0.0))
        and _decomposition_exact(prob_result, cfg.weights),
    }
    report.extras = {
        "train_fingerprint": fingerprint(np.column_stack([X, y])),
        "frozen_mc_fingerprint": fingerprint(frozen),
        "test_fingerprint": fingerprint(np.column_stack([X_test, y_test])),
    }

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        target.to_csv(out_dir / "cdf_target.csv")
        write_csv(
            out_dir / "training_data.csv",
            [f"x{i}" for i in range(X.shape[1])] + ["y"],
            np.column_stack([X, y]).tolist(),
        )
        report.save(out_dir)
    return report


def _decomposition_exact(result, weights: LossWeights) -> bool:
    """Every finite recorded total must equal the weighted component sum."""
    for trial in result.history:
        b: LossBreakdown = trial.breakdown
        if not np.isfinite(b.total):
            continue
        expected = weights.alpha * b.data_loss + weights.beta * b.prob_loss
        expected += weights.gamma * b.physics_loss
        if b.total != expected:
            return False
    return True
