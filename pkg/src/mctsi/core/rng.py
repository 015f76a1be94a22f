"""Seeded random streams.

Streams are Philox (counter-based) generators keyed by a 64-bit master seed and a
tuple of integer stream ids, so ``make_rng(seed, trial, edge)`` is reproducible
no matter which thread or in which order it is created.
"""

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator]


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Return the generator for stream ``stream`` under master ``seed``."""
    seq = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(seq))


def as_rng(seed: SeedLike) -> np.random.Generator:
    """Accept either a seed or an already-owned generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return make_rng(seed)
