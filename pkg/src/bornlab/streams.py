"""Deterministic RNG stream derivation for seeded, parallel-safe trials.

Every trial of a scan gets its own generator derived from (seed, indices),
so results are identical no matter how trials are scheduled across threads.
"""

from __future__ import annotations

import numpy as np


def substream(seed: int, *indices: int) -> np.random.Generator:
    """Return an independent generator for a (seed, trial/phase) address."""
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    return np.random.default_rng(np.random.SeedSequence((seed, *indices)))


def subseed(seed: int, *indices: int) -> int:
    """Derive a child seed for a named phase of a larger experiment."""
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    words = np.random.SeedSequence((seed, *indices)).generate_state(2)
    return (int(words[0]) << 32) | int(words[1])
