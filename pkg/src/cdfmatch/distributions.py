"""Input distributions for sampling model inputs.

Dimensions are mutually independent; each is a uniform or normal marginal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rng import RngStream


@dataclass(frozen=True)
class Marginal:
    """One input dimension: uniform(lower, upper) or normal(mean, sd)."""

    kind: str
    lower: float = 0.0
    upper: float = 1.0
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "normal"):
            raise ValueError(f"unknown marginal kind {self.kind!r}")
        if self.kind == "uniform" and not self.lower < self.upper:
            raise ValueError("uniform marginal requires lower < upper")
        if self.kind == "normal" and self.sd < 0:
            raise ValueError("normal marginal requires sd >= 0")

    @classmethod
    def uniform(cls, lower: float, upper: float) -> "Marginal":
        return cls(kind="uniform", lower=float(lower), upper=float(upper))

    @classmethod
    def normal(cls, mean: float, sd: float) -> "Marginal":
        return cls(kind="normal", mean=float(mean), sd=float(sd))

    @classmethod
    def from_dict(cls, spec: dict) -> "Marginal":
        kind = spec.get("kind")
        if kind == "uniform":
            return cls.uniform(spec["lower"], spec["upper"])
        if kind == "normal":
            return cls.normal(spec["mean"], spec["sd"])
        raise ValueError(f"unknown marginal kind {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform", "lower": self.lower, "upper": self.upper}
        return {"kind": "normal", "mean": self.mean, "sd": self.sd}

    def _draw(self, count: int, gen: np.random.Generator) -> np.ndarray:
        if self.kind == "uniform":
            return gen.uniform(self.lower, self.upper, size=count)
        if self.sd == 0.0:
            return np.full(count, self.mean)
        return gen.normal(self.mean, self.sd, size=count)


@dataclass(frozen=True)
class InputDistribution:
    """Joint distribution of independent marginals, one per input dimension."""

    marginals: tuple[Marginal, ...]

    def __init__(self, marginals: Sequence[Marginal]):
        if len(marginals) < 1:
            raise ValueError("at least one marginal is required")
        object.__setattr__(self, "marginals", tuple(marginals))

    @property
    def dim(self) -> int:
        return len(self.marginals)

    @classmethod
    def from_dicts(cls, specs: Sequence[dict]) -> "InputDistribution":
        return cls([Marginal.from_dict(s) for s in specs])

    def to_dicts(self) -> list[dict]:
        return [m.to_dict() for m in self.marginals]


def sample(dist: InputDistribution, count: int, rng: RngStream) -> np.ndarray:
    """Draw a (count, dim) matrix; column j follows marginal j.

    Deterministic: the same (dist, count, rng) always yields a bit-identical
    matrix.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = rng.generator()
    out = np.empty((count, dist.dim))
    for j, marginal in enumerate(dist.marginals):
        out[:, j] = marginal._draw(count, gen)
    return out
