"""Sequential model-based search over the mixed hyperparameter space.

The categorical kernel choice partitions the budget across kernel families;
within a family the continuous dimensions are searched in log10 space (their
bounds span several decades) with a Latin hypercube start followed by
expected-improvement proposals from a Gaussian-process surrogate, screened
over dense random candidates. A pure random-search strategy is available as
a control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .losses import LossBreakdown
from .rng import RngStream, derive_stream
from .svm import (
    BOX_BOUNDS,
    EPSILON_BOUNDS,
    KERNEL_SCALE_BOUNDS,
    KERNELS,
    HyperParams,
)

EI_CANDIDATES = 2048
DEFAULT_BUDGET = 60
_MAX_INIT_POINTS = 10
_LOCAL_SD = 0.05  # spread of incumbent-local screening candidates (unit cube)


@dataclass(frozen=True)
class SearchSpace:
    """Log10 intervals of the continuous dimensions plus the kernel set."""

    kernel_scale_log10: tuple[float, float] = tuple(np.log10(KERNEL_SCALE_BOUNDS))
    box_log10: tuple[float, float] = tuple(np.log10(BOX_BOUNDS))
    epsilon_log10: tuple[float, float] = tuple(np.log10(EPSILON_BOUNDS))
    kernels: tuple[str, ...] = KERNELS
    include_epsilon: bool = True

    def __post_init__(self) -> None:
        for name in self.kernels:
            if name not in KERNELS:
                raise ValueError(f"unknown kernel {name!r}")
        if len(self.kernels) == 0:
            raise ValueError("at least one kernel family is required")

    @classmethod
    def regression(cls, kernels: Sequence[str] = KERNELS) -> "SearchSpace":
        return cls(kernels=tuple(kernels), include_epsilon=True)

    @classmethod
    def classification(cls, kernels: Sequence[str] = KERNELS) -> "SearchSpace":
        return cls(kernels=tuple(kernels), include_epsilon=False)

    @property
    def dim(self) -> int:
        return 3 if self.include_epsilon else 2

    def _bounds(self) -> np.ndarray:
        rows = [self.kernel_scale_log10, self.box_log10]
        if self.include_epsilon:
            rows.append(self.epsilon_log10)
        return np.array(rows)

    def theta_from_unit(self, kernel: str, point01: np.ndarray) -> HyperParams:
        bounds = self._bounds()
        logs = bounds[:, 0] + point01 * (bounds[:, 1] - bounds[:, 0])
        # clip guards against libm pow landing a hair outside the bounds
        def powed(log_value: float, lo: float, hi: float) -> float:
            return float(min(max(10.0**log_value, lo), hi))

        return HyperParams(
            kernel=kernel,
            kernel_scale=powed(logs[0], *KERNEL_SCALE_BOUNDS),
            box_constraint=powed(logs[1], *BOX_BOUNDS),
            epsilon=powed(logs[2], *EPSILON_BOUNDS) if self.include_epsilon else None,
        )


@dataclass(frozen=True)
class TrialRecord:
    index: int
    theta: HyperParams
    breakdown: LossBreakdown
    best_so_far: float

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "theta": self.theta.as_dict(),
            "breakdown": self.breakdown.to_dict(),
            "best_so_far": self.best_so_far,
        }


@dataclass(frozen=True)
class OptResult:
    best_theta: HyperParams
    best_loss: float
    history: tuple[TrialRecord, ...]

    def to_dict(self) -> dict:
        return {
            "best_theta": self.best_theta.as_dict(),
            "best_loss": self.best_loss,
            "history": [t.to_dict() for t in self.history],
        }


def _norm_cdf(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.array([math.erf(v / math.sqrt(2.0)) for v in z]))


def _norm_pdf(z: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)


class _GpSurrogate:
    """Squared-exponential GP on the unit cube with a fixed-grid length scale.

    The length scale is picked from a small grid by marginal likelihood; the
    observations are standardized, so the signal variance is 1.
    """

    _LENGTH_SCALES = (0.1, 0.2, 0.35, 0.6)
    _NOISE = 1e-8

    def fit(self, X01: np.ndarray, y: np.ndarray) -> "_GpSurrogate":
        self._X = X01
        self._y_mean = float(np.mean(y))
        self._y_sd = float(np.std(y))
        if self._y_sd == 0.0:
            self._y_sd = 1.0
        z = (y - self._y_mean) / self._y_sd

        best = None
        for scale in self._LENGTH_SCALES:
            kmat = self._kernel(X01, X01, scale)
            kmat[np.diag_indices_from(kmat)] += self._NOISE
            try:
                chol = np.linalg.cholesky(kmat)
            except np.linalg.LinAlgError:
                continue
            alpha = np.linalg.solve(chol.T, np.linalg.solve(chol, z))
            lml = (
                -0.5 * float(z @ alpha)
                - float(np.sum(np.log(np.diag(chol))))
                - 0.5 * z.size * math.log(2.0 * math.pi)
            )
            if best is None or lml > best[0]:
                best = (lml, scale, chol, alpha)
        if best is None:  # all factorizations failed; flat prior fallback
            self._scale = self._LENGTH_SCALES[-1]
            self._chol = None
            return self
        _, self._scale, self._chol, self._alpha = best
        return self

    @staticmethod
    def _kernel(A: np.ndarray, B: np.ndarray, scale: float) -> np.ndarray:
        sq = (
            np.sum(A * A, axis=1)[:, None]
            + np.sum(B * B, axis=1)[None, :]
            - 2.0 * (A @ B.T)
        )
        np.clip(sq, 0.0, None, out=sq)
        return np.exp(-0.5 * sq / scale**2)

    def predict(self, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self._chol is None:
            return np.full(Q.shape[0], self._y_mean), np.full(Q.shape[0], self._y_sd)
        kq = self._kernel(self._X, Q, self._scale)
        mu = kq.T @ self._alpha
        v = np.linalg.solve(self._chol, kq)
        var = np.clip(1.0 + self._NOISE - np.sum(v * v, axis=0), 1e-12, None)
        return (
            mu * self._y_sd + self._y_mean,
            np.sqrt(var) * self._y_sd,
        )


def _expected_improvement(mu: np.ndarray, sd: np.ndarray, best: float) -> np.ndarray:
    gap = best - mu
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sd > 0, gap / sd, 0.0)
    ei = gap * _norm_cdf(z) + sd * _norm_pdf(z)
    return np.where(sd > 0, ei, np.maximum(gap, 0.0))


def _latin_hypercube(n: int, dim: int, gen: np.random.Generator) -> np.ndarray:
    out = np.empty((n, dim))
    for j in range(dim):
        out[:, j] = (gen.permutation(n) + gen.uniform(size=n)) / n
    return out


def _family_budgets(budget: int, families: Sequence[str]) -> list[int]:
    base, extra = divmod(budget, len(families))
    return [base + (1 if k < extra else 0) for k in range(len(families))]


def optimize(
    objective: Callable[[HyperParams], LossBreakdown],
    space: SearchSpace,
    budget: int = DEFAULT_BUDGET,
    strategy: str = "smbo",
    rng: Optional[RngStream] = None,
) -> OptResult:
    """Minimize ``objective`` over ``space`` within ``budget`` evaluations.

    A trial whose objective raises is recorded with an infinite total and the
    search continues; if every trial fails the search itself fails.
    """
    if budget < 5:
        raise ValueError("budget must be >= 5")
    if strategy not in ("smbo", "random"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if rng is None:
        rng = RngStream(0)

    history: list[TrialRecord] = []
    best_total = float("inf")
    best_theta: Optional[HyperParams] = None

    def run_trial(theta: HyperParams) -> float:
        nonlocal best_total, best_theta
        try:
            breakdown = objective(theta)
        except Exception:
            breakdown = LossBreakdown.failed()
        if breakdown.total < best_total:
            best_total = breakdown.total
            best_theta = theta
        history.append(TrialRecord(len(history), theta, breakdown, best_total))
        return breakdown.total

    for fam_index, kernel in enumerate(space.kernels):
        fam_budget = _family_budgets(budget, space.kernels)[fam_index]
        if fam_budget == 0:
            continue
        gen = derive_stream(rng, fam_index).generator()

        if strategy == "random":
            for _ in range(fam_budget):
                run_trial(space.theta_from_unit(kernel, gen.uniform(size=space.dim)))
            continue

        n_init = min(_MAX_INIT_POINTS, max(1, fam_budget // 3), fam_budget)
        points = _latin_hypercube(n_init, space.dim, gen)
        totals = [run_trial(space.theta_from_unit(kernel, pt)) for pt in points]
        observed = list(points)

        for _ in range(fam_budget - n_init):
            values = np.array(totals)
            finite = np.isfinite(values)
            # half the screened candidates explore globally, half refine
            # around the family incumbent
            n_local = EI_CANDIDATES // 2
            candidates = gen.uniform(size=(EI_CANDIDATES - n_local, space.dim))
            if finite.sum() >= 2:
                incumbent = np.array(observed)[finite][int(np.argmin(values[finite]))]
                local = incumbent + gen.normal(0.0, _LOCAL_SD, size=(n_local, space.dim))
                candidates = np.vstack([candidates, np.clip(local, 0.0, 1.0)])
                # failed trials get a penalty value so EI avoids their region
                fmax = values[finite].max()
                spread = fmax - values[finite].min()
                y_fit = np.where(finite, values, fmax + max(spread, 1.0))
                surrogate = _GpSurrogate().fit(np.array(observed), y_fit)
                mu, sd = surrogate.predict(candidates)
                scores = _expected_improvement(mu, sd, values[finite].min())
                pick = candidates[int(np.argmax(scores))]
            else:
                pick = candidates[0]
            totals.append(run_trial(space.theta_from_unit(kernel, pick)))
            observed.append(pick)

    if best_theta is None:
        raise RuntimeError("all trials failed")
    return OptResult(best_theta=best_theta, best_loss=best_total, history=tuple(history))


def baseline_theta(train: tuple, task: str = "regression") -> HyperParams:
    """Reference model settings used without any search.

    Linear kernel with unit scale and unit box; the regression tube defaults
    to IQR(y)/13.49 clamped into the search bounds.
    """
    if task not in ("regression", "classification"):
        raise ValueError(f"unknown task {task!r}")
    if task == "classification":
        return HyperParams(kernel="linear", kernel_scale=1.0, box_constraint=1.0)
    _, y = train
    y = np.asarray(y, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("training targets must be non-empty")
    iqr = float(np.quantile(y, 0.75) - np.quantile(y, 0.25))
    epsilon = min(max(iqr / 13.49, EPSILON_BOUNDS[0]), EPSILON_BOUNDS[1])
    return HyperParams(
        kernel="linear", kernel_scale=1.0, box_constraint=1.0, epsilon=epsilon
    )
