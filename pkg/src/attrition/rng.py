"""Seed handling.

Every random stream is a numpy ``Generator`` over the PCG64 bit generator,
seeded with a 64-bit unsigned integer. Child seeds are derived with the
SplitMix64 finalizer so that a seed for (master, index) never depends on how
many draws another stream made; forests trained serially or in parallel are
therefore identical.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(seed: int, index: int) -> int:
    """Derive the seed of child stream `index` from `seed`."""
    return splitmix64(splitmix64(seed & MASK64) ^ (index & MASK64))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))
