"""
Seeded random number generation.

Every randomized routine draws from numpy's Philox4x64 counter-based bit
generator, so a given seed yields the same stream on every platform.
"""
import numpy as np

SEED_MASK = (1 << 64) - 1


def validate_seed(seed: int) -> int:
    """
    Check that a seed fits in an unsigned 64-bit integer.

    Returns:
        The seed as a Python int

    Raises:
        ValueError: If the seed is negative or too large
    """
    seed = int(seed)
    if seed < 0 or seed > SEED_MASK:
        raise ValueError(f"seed {seed} is not an unsigned 64-bit integer")
    return seed


def make_rng(seed: int) -> np.random.Generator:
    """Generator over Philox4x64 keyed by the seed."""
    return np.random.Generator(np.random.Philox(validate_seed(seed)))


def trial_seed(seed: int, trial: int) -> int:
    """Seed for the trial-th member of a batch: seed XOR trial."""
    return (validate_seed(seed) ^ int(trial)) & SEED_MASK
