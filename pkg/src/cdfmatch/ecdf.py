"""Empirical CDFs, Monte Carlo CDF estimation, and threshold grids.

The CDF of the model output is what the probabilistic loss compares against a
target CDF, so everything here is deterministic and cheap to evaluate on a
grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .distributions import InputDistribution, sample
from .rng import RngStream

GRID_SIZE_DEFAULT = 100
_SUPPORT_MARGIN = 0.05  # widen grids by 5% of the union width on each side


@dataclass(frozen=True)
class EmpiricalCdf:
    """Monotone CDF defined by knots (y_k, p_k).

    Evaluation is 0 below the first knot and 1 at or above the last knot.
    Between knots the value is either the step value of the knot at or below y
    (``step``) or the linear interpolation of the bracketing knots
    (``linear``).
    """

    ys: np.ndarray
    ps: np.ndarray
    interpolation: str = "linear"
    sample_inputs: Optional[np.ndarray] = field(default=None, compare=False)
    sample_outputs: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        ys = np.asarray(self.ys, dtype=float)
        ps = np.asarray(self.ps, dtype=float)
        if ys.ndim != 1 or ys.size == 0 or ys.shape != ps.shape:
            raise ValueError("knots must be two equal-length 1-D arrays")
        if ys.size > 1 and not np.all(np.diff(ys) > 0):
            raise ValueError("knot positions must be strictly ascending")
        if np.any(np.diff(ps) < 0) or ps[0] < 0 or ps[-1] > 1:
            raise ValueError("knot probabilities must be non-decreasing in [0, 1]")
        if self.interpolation not in ("step", "linear"):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "ps", ps)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.ys[0]), float(self.ys[-1])

    def evaluate(self, y) -> np.ndarray | float:
        scalar = np.isscalar(y)
        yq = np.atleast_1d(np.asarray(y, dtype=float))
        if self.interpolation == "linear":
            out = np.interp(yq, self.ys, self.ps)
        else:
            idx = np.searchsorted(self.ys, yq, side="right") - 1
            out = np.where(idx >= 0, self.ps[np.clip(idx, 0, None)], 0.0)
        out = np.where(yq < self.ys[0], 0.0, out)
        out = np.where(yq >= self.ys[-1], 1.0, out)
        return float(out[0]) if scalar else out

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("y,p\n")
            for y, p in zip(self.ys, self.ps):
                fh.write(f"{float(y)!r},{float(p)!r}\n")

    @classmethod
    def from_csv(cls, path, interpolation: str = "linear") -> "EmpiricalCdf":
        ys, ps = [], []
        with open(path) as fh:
            header = fh.readline()
            if header.strip() != "y,p":
                raise ValueError(f"expected 'y,p' header in {path}")
            for line in fh:
                a, b = line.strip().split(",")
                ys.append(float(a))
                ps.append(float(b))
        return cls(np.array(ys), np.array(ps), interpolation=interpolation)


def ecdf_build(values, interpolation: str = "step") -> EmpiricalCdf:
    """Empirical CDF F(y) = (#observations <= y) / n.

    The default step mode reproduces the counting definition exactly at every
    query point; linear mode interpolates between the observed knots.
    """
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("no observations")
    if not np.all(np.isfinite(arr)):
        raise ValueError("observations must be finite")
    ys, counts = np.unique(arr, return_counts=True)
    ps = np.cumsum(counts) / arr.size
    return EmpiricalCdf(ys, ps, interpolation=interpolation)


def ecdf_eval(cdf: EmpiricalCdf, y) -> np.ndarray | float:
    return cdf.evaluate(y)


def mc_cdf(
    predict: Callable[[np.ndarray], np.ndarray],
    dist: InputDistribution,
    sample_count: int,
    rng: RngStream,
    interpolation: str = "linear",
) -> EmpiricalCdf:
    """CDF of predict(X) with X drawn from ``dist``, by plain Monte Carlo.

    The drawn inputs and the predicted outputs stay attached to the result
    (``sample_inputs`` / ``sample_outputs``) so the same design can double as
    a training set.
    """
    if sample_count < 100:
        raise ValueError("sample_count must be >= 100")
    inputs = sample(dist, sample_count, rng)
    outputs = np.asarray(predict(inputs), dtype=float).ravel()
    if outputs.shape != (sample_count,):
        raise ValueError("predict must return one value per input row")
    bad = int(np.count_nonzero(~np.isfinite(outputs)))
    if bad:
        raise ValueError(f"predict returned {bad} non-finite values")
    cdf = ecdf_build(outputs, interpolation=interpolation)
    object.__setattr__(cdf, "sample_inputs", inputs)
    object.__setattr__(cdf, "sample_outputs", outputs)
    return cdf


@dataclass(frozen=True)
class ThresholdGrid:
    """Strictly ascending thresholds used to discretize CDF distances."""

    thresholds: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.thresholds, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("grid needs at least two thresholds")
        if not np.all(np.diff(arr) > 0):
            raise ValueError("thresholds must be strictly ascending")
        object.__setattr__(self, "thresholds", arr)

    @property
    def size(self) -> int:
        return int(self.thresholds.size)

    @property
    def spacing(self) -> float:
        return float((self.thresholds[-1] - self.thresholds[0]) / (self.size - 1))


def make_grid(
    target: EmpiricalCdf, predicted: EmpiricalCdf, size: int = GRID_SIZE_DEFAULT
) -> ThresholdGrid:
    """Equally spaced grid over the union of both supports plus a 5% margin.

    A zero-width union (two degenerate CDFs at the same point) falls back to
    [c - 1, c + 1] so distances stay finite and informative.
    """
    if size < 2:
        raise ValueError("grid size must be >= 2")
    lo = min(target.support[0], predicted.support[0])
    hi = max(target.support[1], predicted.support[1])
    width = hi - lo
    if width == 0.0:
        lo, hi = lo - 1.0, hi + 1.0
    else:
        lo -= _SUPPORT_MARGIN * width
        hi += _SUPPORT_MARGIN * width
    return ThresholdGrid(np.linspace(lo, hi, size))
