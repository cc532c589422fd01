"""Seeded random streams.

Every random draw in the package goes through a :class:`numpy.random.Generator`
backed by Philox, a counter-based 64-bit generator whose output is identical on
every platform for a given key. Streams are addressed by ``(seed, *indices)`` so
that a trial's randomness never depends on execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ALGORITHM = "philox4x64-10"


@dataclass(frozen=True)
class RandomSource:
    """A reproducible stream: ``(seed, stream)`` always yields the same draws."""

    seed: int
    stream: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        entropy = [int(self.seed), *map(int, self.stream)]
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))

    def child(self, *indices: int) -> "RandomSource":
        return RandomSource(self.seed, self.stream + tuple(int(i) for i in indices))

    @property
    def algorithm(self) -> str:
        return ALGORITHM


def as_generator(rng=None) -> np.random.Generator:
    """Coerce ``None``, an int seed, a :class:`RandomSource` or a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RandomSource):
        return rng.generator()
    if rng is None:
        return RandomSource(0).generator()
    if isinstance(rng, (int, np.integer)):
        return RandomSource(int(rng)).generator()
    raise TypeError(f"cannot build a random generator from {type(rng).__name__}")


def trial_generator(seed: int, point: int, trial: int) -> np.random.Generator:
    """Stream for one Monte Carlo trial of one sweep point."""
    return RandomSource(seed, (point, trial)).generator()
