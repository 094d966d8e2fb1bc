"""Reproducible random streams keyed by ``(seed, stream_id)``."""
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Identifies an independent random stream.

    Two streams with equal ``(seed, stream_id)`` produce identical draws; distinct
    stream ids are statistically independent (``SeedSequence`` spawn keys).
    """

    seed: int = 0
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=self.seed & _MASK64, spawn_key=(self.stream_id & _MASK64,)
        )
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream_id: int) -> "RngStream":
        """Stream with the same seed and a different id."""
        return RngStream(self.seed, stream_id)


def as_generator(rng) -> np.random.Generator:
    """Accept an ``RngStream``, a ``Generator`` or an int seed."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngStream(int(rng or 0)).generator()
    raise TypeError(f"cannot build a random generator from {type(rng).__name__}")
