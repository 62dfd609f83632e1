"""
LSCM Toolkit - Random Streams

Counter-keyed random generators. A stream is identified by a root seed plus a
tuple of non-negative integer counters (for example beam and chunk, or sweep
point and trial), so the draws do not depend on the order in which streams are
consumed.
"""

import numpy as np


def stream(seed: int, *counters: int) -> np.random.Generator:
    """
    Generator for the stream ``(seed, *counters)``.

    Args:
        seed: Root seed (non-negative integer).
        *counters: Stream coordinates, each a non-negative integer.

    Returns:
        numpy.random.Generator: Independent, reproducible generator.
    """
    if seed is None or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed}")
    if any(c < 0 for c in counters):
        raise ValueError(f"stream counters must be non-negative, got {counters}")
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(c) for c in counters))
    return np.random.Generator(np.random.PCG64DXSM(sequence))


def chunk_bounds(t_count: int, chunk_size: int):
    """Yield (chunk, start, stop) triples covering range(t_count)."""
    if chunk_size < 1:
        raise ValueError(f"chunk size must be positive, got {chunk_size}")
    for chunk, start in enumerate(range(0, t_count, chunk_size)):
        yield chunk, start, min(start + chunk_size, t_count)
