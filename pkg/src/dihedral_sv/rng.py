"""Seeded, splittable random streams.

Every stream is a ``numpy.random.Generator`` over PCG64 whose seed sequence is
derived from a master seed plus a spawn key, so a trial's stream depends only
on ``(master_seed, trial_index)`` and never on execution order.
"""

from __future__ import annotations

import numpy as np


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Generator for the sub-stream addressed by ``key`` under ``master_seed``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def split(rng: np.random.Generator, count: int) -> list[np.random.Generator]:
    """Deterministically derive ``count`` independent children from ``rng``."""
    return list(rng.spawn(count))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
