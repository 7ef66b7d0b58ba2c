"""Seeded random number generation.

All stochastic routines in the package draw from numpy's Philox bit
generator, a counter-based 64-bit generator whose streams are identical
across platforms and word sizes.  Every public sampler takes an explicit
integer seed; derived per-trial seeds are ``seed XOR trial_index``.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    """Return a Generator backed by Philox keyed with the 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))


def trial_seed(seed: int, trial_index: int) -> int:
    return (int(seed) & _MASK64) ^ (int(trial_index) & _MASK64)
