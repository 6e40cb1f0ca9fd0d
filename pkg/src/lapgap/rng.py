"""Counter-based, splittable random streams.

Every stream is a Philox generator keyed by a ``SeedSequence`` built from a
path of integers, e.g. ``(master_seed, trial_index)``.  The same path always
yields the same stream, independently of process or scheduling.
"""

from __future__ import annotations

import numpy as np

# Domain tags keep streams for different purposes disjoint.
SAMPLE = 0
SWITCH = 1
AUX = 2


def _sequence(seed: int, path: tuple[int, ...]) -> np.random.SeedSequence:
    if seed < 0 or any(int(p) < 0 for p in path):
        raise ValueError("seeds and stream ids must be nonnegative integers")
    return np.random.SeedSequence([int(seed), *map(int, path)])


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the Philox generator for ``(seed, *path)``."""
    return np.random.Generator(np.random.Philox(_sequence(seed, path)))


def derive_seed(seed: int, *path: int) -> int:
    """Pure function ``(seed, *path) -> 64-bit seed``."""
    return int(_sequence(seed, path).generate_state(1, np.uint64)[0])
