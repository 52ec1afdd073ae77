"""Seeded random streams.

Every random draw in the package goes through :func:`stream`, which hashes
``(seed, *keys)`` into a fresh PCG64 generator.  Trial ``k`` of an experiment
seeded with ``s`` therefore sees the same numbers no matter which worker runs
it or in which order the trials execute.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``."""
    entropy = [int(seed) & _MASK64] + [int(k) & _MASK64 for k in keys]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *keys: int) -> int:
    """64-bit child seed, for records that store per-trial seeds."""
    ss = np.random.SeedSequence([int(seed) & _MASK64] + [int(k) & _MASK64 for k in keys])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
