"""Deterministic random streams.

Every consumer of randomness asks for a child stream by (seed, tag, index). The
child seed is a keyed hash, so adding a new tag never shifts an existing stream.

Documented tags:

    graph.weld         weld cycle interleaving
    graph.labels       vertex label assignment
    graph.coloring     color-to-matching assignment
    permutation        color-preserving permutation draws
    circuit            random genuine circuit generation
    classical.sample   transcript-state sampling in the classical simulation
    hardness.trial     per-trial permutation in the hardness Monte Carlo
    hardness.subtree   per-trial random address subtree
    hardness.tuple     color tuple drawn for path and desirable experiments
    walk.baseline      classical baseline search
"""

from __future__ import annotations

import hashlib
import logging
import os
import random
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")

WORKERS_ENV = "WELDEDTREE_WORKERS"


def derive_seed(seed: int, tag: str, index: int = 0) -> int:
    """64-bit child seed for (seed, tag, index)."""
    payload = f"{int(seed)}\x1f{tag}\x1f{int(index)}".encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def stream(seed: int, tag: str, index: int = 0) -> random.Random:
    """Seeded ``random.Random`` child stream."""
    return random.Random(derive_seed(seed, tag, index))


def numpy_stream(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    """Seeded numpy ``Generator`` child stream."""
    return np.random.default_rng(derive_seed(seed, tag, index))


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(value))
    except ValueError:
        logger.warning("ignoring non-integer %s=%r", WORKERS_ENV, value)
        return 1


def run_trials(fn: Callable[[int], T], count: int, workers: int = 1) -> list[T]:
    """
    Evaluate ``fn(i)`` for i in range(count), ordered by trial index.

    Args:
        fn: Picklable trial function; must derive all randomness from its index
        count: Number of trials
        workers: Process count; 1 runs inline

    Returns:
        Results in trial order, identical for any worker count
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if workers <= 1 or count < 2:
        return [fn(i) for i in range(count)]
    chunk = max(1, count // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count), chunksize=chunk))
