"""Seeded random streams.

All randomness comes from numpy's PCG64 generator. A run seed is turned into a
``SeedSequence`` and split into independent child streams, so drawing from one
stream (for example synthetic test data) never shifts another (the training
index sequence).
"""

import numpy as np

# Child stream slots, in spawn order
TRAIN_STREAM = 0
DATA_STREAM = 1
EVAL_STREAM = 2
_STREAM_COUNT = 3


def spawn_streams(seed: int) -> list[np.random.Generator]:
    """Split a 64-bit seed into independent PCG64 generators.

    Args:
        seed: Non-negative integer seed

    Returns:
        Generators indexed by TRAIN_STREAM, DATA_STREAM and EVAL_STREAM
    """
    if seed < 0:
        raise ValueError(f"Seed must be non-negative, got {seed}")
    children = np.random.SeedSequence(seed).spawn(_STREAM_COUNT)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def stream(seed: int, slot: int) -> np.random.Generator:
    """Get a single child generator for a seed."""
    return spawn_streams(seed)[slot]
