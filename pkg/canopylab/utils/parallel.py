"""
Row-band parallelism.

Grids are split into disjoint bands of rows; each worker computes only its
own rows, so results never depend on the number of workers.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional, TypeVar

from . import config

logger = logging.getLogger(__name__)

T = TypeVar("T")


def resolve_threads(threads: Optional[int] = None) -> int:
    """
    Resolve a thread count, where None means config.THREADS and 0 means auto.

    Args:
        threads: Requested number of workers

    Returns:
        A positive worker count
    """
    if threads is None:
        threads = config.THREADS
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def row_bands(height: int, threads: int) -> list[tuple[int, int]]:
    """
    Split rows 0..height into contiguous, near-equal bands.

    Args:
        height: Number of rows
        threads: Number of bands wanted

    Returns:
        List of (start_row, stop_row) pairs covering every row once
    """
    count = max(1, min(threads, height))
    edges = [round(i * height / count) for i in range(count + 1)]
    return [(edges[i], edges[i + 1]) for i in range(count) if edges[i] < edges[i + 1]]


def map_row_bands(
    func: Callable[[int, int], T], height: int, threads: Optional[int] = None
) -> list[T]:
    """
    Apply func(start_row, stop_row) to every row band, in band order.

    Args:
        func: Worker computing the result for one band
        height: Number of grid rows
        threads: Worker count (None = config, 0 = auto)

    Returns:
        Band results ordered top to bottom
    """
    workers = resolve_threads(threads)
    bands = row_bands(height, workers)
    logger.debug(f"Processing {height} rows in {len(bands)} band(s) on {workers} worker(s)")
    if len(bands) <= 1:
        return [func(start, stop) for start, stop in bands]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, start, stop) for start, stop in bands]
        return [future.result() for future in futures]
