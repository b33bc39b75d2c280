"""
Parallel sweep helper shared by the services.

Runs independent evaluations (one per SNR point, subset or path chunk) on a
thread pool and returns results in input order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from src.config import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Sequence[T], jobs: Optional[int] = None) -> List[R]:
    """
    Apply fn to every item, using up to `jobs` worker threads.

    Args:
        fn: Function of one item
        items: Inputs
        jobs: Worker count (defaults to config.jobs)

    Returns:
        Results in the order of `items`
    """
    jobs = jobs or config.jobs
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    results: List[Optional[R]] = [None] * len(items)
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        future_to_index = {executor.submit(fn, item): k for k, item in enumerate(items)}
        for future in as_completed(future_to_index):
            k = future_to_index[future]
            try:
                results[k] = future.result()
            except Exception as e:
                logger.error(f"Sweep point {items[k]!r} failed: {e}", exc_info=True)
                raise
    logger.debug(f"Completed sweep of {len(items)} points on {jobs} workers")
    return results
