"""
Seeded random streams.

Streams are PCG64 generators fed by `numpy.random.SeedSequence`, which gives
identical draws on every platform. Child streams are addressed by a counter
(the spawn key), so stream `i` of a master seed never depends on how many
other streams were drawn or on which thread draws them.
"""

from __future__ import annotations

import numpy as np

RandomStream = np.random.Generator

_SEED_MODULUS = 2**64


def _entropy(seed: int) -> int:
    return int(seed) % _SEED_MODULUS


def seeded_rng(seed: int) -> RandomStream:
    """Returns a deterministic stream for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(_entropy(seed))))


def child_rng(seed: int, *path: int) -> RandomStream:
    """
    Returns the stream addressed by `path` under a master seed.

    Args:
        seed: Master seed.
        *path: Counter path, e.g. (trajectory_index,) or (pair_index, clock_index).

    Returns:
        A stream that depends only on (seed, path).
    """
    sequence = np.random.SeedSequence(_entropy(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(sequence))
