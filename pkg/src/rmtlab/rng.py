"""Counter-based random streams: one independent generator per (seed, trial)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomStream:
    """A reproducible random stream keyed by (seed, stream_id).

    Backed by Philox, so the generator is an O(1) pure function of the key:
    the same (seed, stream_id) yields bit-identical draws on any thread
    schedule, and distinct stream_ids give statistically independent streams.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, stream_id: int) -> "RandomStream":
        return RandomStream(self.seed, stream_id)


def seeded_stream(seed: int, stream_id: int = 0) -> RandomStream:
    return RandomStream(seed, stream_id)
