"""Block-parallel Monte Carlo driver.

Trials are cut into fixed-size blocks; block ``j`` always draws from
``rng.derive(j)``. The partition never depends on the worker count, so 1 and
``w`` workers see identical random numbers and produce identical sums.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable

import numpy as np

from .rng import RngStream

BLOCK_SIZE = 8192


def block_sizes(trials: int, block_size: int = BLOCK_SIZE) -> list[int]:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    full, rest = divmod(trials, block_size)
    return [block_size] * full + ([rest] if rest else [])


def _run_one(args):
    fn, size, seed, stream_id = args
    return np.asarray(fn(size, RngStream(seed, stream_id)))


def run_blocks(fn: Callable[[int, RngStream], np.ndarray], trials: int, rng: RngStream,
               workers: int = 1, block_size: int = BLOCK_SIZE) -> np.ndarray:
    """Sum ``fn(block_trials, block_rng)`` over all blocks.

    ``fn`` must return an integer count vector and be picklable when
    ``workers > 1``.
    """
    jobs = [(fn, size, rng.seed, rng.stream_id + (j,))
            for j, size in enumerate(block_sizes(trials, block_size))]
    if workers <= 1 or len(jobs) == 1:
        parts = [_run_one(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_one, jobs))
    return np.sum(parts, axis=0)


def binomial_std_err(successes: int, trials: int) -> float:
    p = successes / trials
    return float(np.sqrt(p * (1 - p) / trials))
