"""Deterministic seed derivation.

Every stochastic routine takes an integer master seed and derives child
generators through ``numpy.random.SeedSequence`` spawn keys.  A child is
addressed by a tuple of small non-negative integers, so the stream drawn by
any (path, driver, chunk, ...) slot is a pure function of the master seed and
the address -- independent of scheduling and worker count.
"""

from __future__ import annotations

import numpy as np

# top-level address tags; keep stable, results depend on them
TAG_PATH = 0
TAG_ENSEMBLE = 1
TAG_SYMBOL_MC = 2
TAG_EXPERIMENT = 3


def seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    """SeedSequence for master ``seed`` at address ``key``."""
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))


def rng_at(seed: int, *key: int) -> np.random.Generator:
    """Generator for master ``seed`` at address ``key``."""
    return np.random.default_rng(seed_sequence(seed, *key))
