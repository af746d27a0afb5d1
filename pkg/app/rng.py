"""
Seeded random number generators for reproducible runs.
"""

from typing import List, Optional, Union

import numpy as np

from app.config import settings

SeedLike = Union[int, np.random.Generator, None]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """
    Return a PCG64 generator.

    Args:
        seed: Integer seed, an existing generator (returned as is), or None
              for the configured default seed

    Returns:
        numpy Generator
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        seed = settings.SEED
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_rngs(seed: SeedLike, count: int) -> List[np.random.Generator]:
    """
    Derive `count` independent child generators.

    Children depend only on the seed and their position, so a section of a
    run draws the same numbers whether or not other sections ran.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if isinstance(seed, np.random.Generator):
        return seed.spawn(count)
    if seed is None:
        seed = settings.SEED
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def seed_of(seed: Optional[int]) -> int:
    """Resolve an optional seed to the value actually used."""
    return settings.SEED if seed is None else int(seed)


def shot_uniforms(rng: np.random.Generator, shots: int) -> np.ndarray:
    """
    One uniform in [0, 1) per shot, each from its own child seed sequence.

    Shot i's value depends only on the generator's seed sequence, the number
    of children it already spawned, and i. Draws are identical whether the
    shots run serially, in chunks or in parallel.

    Args:
        rng: Parent generator (its seed sequence is spawned from, its stream is not consumed)
        shots: Number of shots

    Returns:
        float64 array of length `shots`
    """
    if shots < 0:
        raise ValueError("shots must be non-negative")
    children = rng.bit_generator.seed_seq.spawn(shots)
    words = np.fromiter(
        (child.generate_state(1, np.uint64)[0] for child in children), dtype=np.uint64, count=shots
    )
    # top 53 bits of each word
    return (words >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)
