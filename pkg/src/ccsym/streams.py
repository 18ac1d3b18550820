"""Deterministic random streams keyed by (seed, index, ...).

Every replicate, Monte Carlo run and yearly window draws from its own Philox
stream derived from the master seed and an integer key path, so results do
not depend on execution order or worker count.
"""

import numpy as np


def _seed_sequence(seed, keys):
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator for the stream identified by ``(seed, *keys)``."""
    return np.random.Generator(np.random.Philox(_seed_sequence(seed, keys)))


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit child seed for ``(seed, *keys)``; stable across platforms."""
    state = _seed_sequence(seed, keys).generate_state(1, dtype=np.uint64)
    return int(state[0])
