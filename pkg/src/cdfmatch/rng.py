"""Counter-based random streams with value semantics.

A stream is fully identified by (seed, stream_id). Identical pairs always
produce identical draws, and child streams derived with distinct indices are
statistically independent, so experiment components can be handed their own
stream and replayed in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def _mix64(value: int) -> int:
    # splitmix64 finalizer; avalanches all input bits into the output
    value = (value + 0x9E3779B97F4A7C15) & _MASK64
    value = ((value ^ (value >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    value = ((value ^ (value >> 27)) * 0x94D049BB133111EB) & _MASK64
    return value ^ (value >> 31)


@dataclass(frozen=True)
class RngStream:
    """Immutable handle for a reproducible random stream."""

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & _MASK64)

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RngStream":
        return derive_stream(self, index)


def derive_stream(rng: RngStream, child_index: int) -> RngStream:
    """Deterministic child stream; distinct indices give distinct streams."""
    if child_index < 0:
        raise ValueError("child_index must be non-negative")
    mixed = _mix64(rng.stream_id ^ _mix64(child_index + 1))
    return RngStream(seed=rng.seed, stream_id=mixed)
