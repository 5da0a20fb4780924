"""Derived random streams."""

import numpy as np


def derive_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Independent generator for a (master seed, index, ...) path.

    The same path always yields the same stream, regardless of which other streams were
    drawn before it, so fold and subject work can run in any order.
    """
    return np.random.default_rng(np.random.SeedSequence([master_seed, *path]))


def derive_seed(master_seed: int, *path: int) -> int:
    """Integer seed derived from a (master seed, index, ...) path."""
    state = np.random.SeedSequence([master_seed, *path]).generate_state(1, dtype=np.uint32)
    return int(state[0])
