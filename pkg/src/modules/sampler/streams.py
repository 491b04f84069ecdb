"""Per-worker random streams and the deterministic worker pool."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")


def worker_stream(seed: int, worker: int) -> np.random.Generator:
    """Counter-based stream: Philox keyed by ``seed``, jumped ``worker`` times."""
    return np.random.Generator(np.random.Philox(seed).jumped(worker))


def split_paths(total: int, workers: int) -> List[int]:
    """Contiguous block sizes; the first ``total % workers`` blocks get one extra path."""
    base, extra = divmod(total, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def run_workers(task: Callable[[int, int, np.random.Generator], T], seed: int, total: int, workers: int) -> List[T]:
    """Run ``task(worker, count, rng)`` per worker; results in worker order."""
    sizes = split_paths(total, workers)
    if workers == 1:
        return [task(0, sizes[0], worker_stream(seed, 0))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task, w, sizes[w], worker_stream(seed, w)) for w in range(workers)]
        results = [f.result() for f in futures]
    logger.info("%d workers finished %d paths", workers, total)
    return results
