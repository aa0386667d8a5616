"""Reproducible randomness for Monte Carlo runs.

Every block of ``BLOCK_SIZE`` consecutive trials gets its own Philox
(counter-based) generator keyed by ``(seed, stream, block)``.  Blocks never
share state, so the merged result does not depend on how many workers run
them or in which order they finish.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

BLOCK_SIZE = 4096

T = TypeVar("T")


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, block])))


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    """A single generator for ad-hoc draws (single-trial helpers, tests)."""
    return block_generator(seed, stream, 0)


def blocks(n: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int, int]]:
    """Split ``n`` trials into ``(block_index, start, size)`` triples."""
    return [(b, start, min(block_size, n - start)) for b, start in enumerate(range(0, n, block_size))]


def map_blocks(
    fn: Callable[[int, int, int], T], n: int, workers: int = 1, block_size: int = BLOCK_SIZE
) -> list[T]:
    """Run ``fn(block, start, size)`` over all blocks; results come back in block order."""
    work = blocks(n, block_size)
    if workers <= 1 or len(work) <= 1:
        return [fn(*w) for w in work]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda w: fn(*w), work))
