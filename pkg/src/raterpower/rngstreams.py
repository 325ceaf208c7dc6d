"""Deterministic RNG stream derivation.

Every random quantity in the package is drawn from a generator derived from
(seed, *path) where the path is a fixed tuple of small integers naming the
consumer (experiment arm, chunk index, trial index, ...).  Results are then
identical for a given seed no matter how work is scheduled across threads.
"""

from __future__ import annotations

import numpy as np

# Stream tags. Never renumber: encoded into every derived seed.
BASE = 0
ALT = 1
NULL = 2
TRIAL = 3
FIT = 4
SCORE = 5


def seed_sequence(seed: int, *path: int) -> np.random.SeedSequence:
    if int(seed) < 0:
        from .errors import InvalidParam

        raise InvalidParam("seed", "seed must be a nonnegative integer")
    return np.random.SeedSequence([int(seed), *[int(p) for p in path]])


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, *path))


def chunk_ranges(total: int, chunk: int) -> list[tuple[int, int]]:
    """Fixed partition of range(total) into contiguous chunks.

    The partition depends only on (total, chunk), never on thread count, so
    chunked consumers stay deterministic under parallel execution.
    """
    if chunk < 1:
        raise ValueError("chunk must be >= 1")
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
