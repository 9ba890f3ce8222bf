"""Shared machinery for the experiment pipelines.

Every experiment compares the same three training regimes on identical data:

* ``baseline``  - reference hyperparameters, no search.
* ``rmse``      - search minimizing the data term only.
* ``prob``      - search minimizing the full composite loss.

Both searched regimes consume the same budget, the same frozen evaluation
inputs, and the same proposal stream, so their trajectories differ only
through the objective. Reports serialize to stable JSON (sorted keys, no
timestamps), which makes byte-identical re-runs checkable.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..hpo import OptResult, TrialRecord
from ..svm import HyperParams

REGIME_BASELINE = "baseline"
REGIME_RMSE = "rmse"
REGIME_PROB = "prob"
REGIMES = (REGIME_BASELINE, REGIME_RMSE, REGIME_PROB)


def fingerprint(array: np.ndarray) -> str:
    """Stable digest of an array's shape and bytes."""
    digest = hashlib.sha256()
    digest.update(str(array.shape).encode())
    digest.update(np.ascontiguousarray(array).tobytes())
    return digest.hexdigest()


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _fmt(value) -> str:
    if isinstance(value, float):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf"
        return repr(value)
    return str(value)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def write_trials_csv(path: Path, history: tuple[TrialRecord, ...]) -> None:
    rows = []
    for trial in history:
        theta = trial.theta
        rows.append(
            [
                trial.index,
                theta.kernel,
                theta.kernel_scale,
                theta.box_constraint,
                theta.epsilon if theta.epsilon is not None else "",
                trial.breakdown.data_loss,
                trial.breakdown.prob_loss,
                trial.breakdown.total,
                trial.best_so_far,
            ]
        )
    write_csv(
        path,
        ["index", "kernel", "K", "B", "eps", "data_loss", "prob_loss", "total", "best_so_far"],
        rows,
    )


def write_convergence_csv(path: Path, history: tuple[TrialRecord, ...]) -> None:
    rows = [[t.index, t.breakdown.total, t.best_so_far] for t in history]
    write_csv(path, ["index", "total", "best_so_far"], rows)


def persist_opt_result(directory: Path, result: OptResult) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    write_trials_csv(directory / "trials.csv", result.history)
    write_convergence_csv(directory / "convergence.csv", result.history)
    write_json(directory / "history.json", result.to_dict())


@dataclass
class RegimeReport:
    """Per-regime outcome of one experiment run."""

    name: str
    theta: HyperParams
    train_metrics: dict = field(default_factory=dict)
    test_metrics: dict = field(default_factory=dict)
    cdf_distance_fresh: Optional[float] = None
    best_loss: Optional[float] = None
    n_trials: int = 0

    def to_dict(self) -> dict:
        out = {
            "theta": self.theta.as_dict(),
            "train_metrics": self.train_metrics,
            "test_metrics": self.test_metrics,
            "n_trials": self.n_trials,
        }
        if self.cdf_distance_fresh is not None:
            out["cdf_distance_on_fresh_samples"] = self.cdf_distance_fresh
        if self.best_loss is not None:
            out["best_loss"] = self.best_loss
        return out


@dataclass
class ExperimentReport:
    """Aggregated outcome: regimes, qualitative verdicts, hard invariants.

    ``invariants`` cover run integrity (shared data, shared budgets); the
    process exit code keys off them. ``verdicts`` record the qualitative
    comparisons and are reported, not enforced.
    """

    name: str
    config: dict
    regimes: dict[str, RegimeReport] = field(default_factory=dict)
    verdicts: dict[str, bool] = field(default_factory=dict)
    invariants: dict[str, bool] = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def invariants_ok(self) -> bool:
        return all(self.invariants.values())

    def to_dict(self) -> dict:
        return {
            "experiment": self.name,
            "config": self.config,
            "regimes": {name: regime.to_dict() for name, regime in self.regimes.items()},
            "verdicts": self.verdicts,
            "invariants": self.invariants,
            **self.extras,
        }

    def save(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_json(out_dir / "results.json", self.to_dict())
