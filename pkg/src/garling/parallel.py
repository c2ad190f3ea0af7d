"""Order-preserving parallel map for independent norm evaluations.

The numba kernels release the GIL, so threads give real speed-ups.  Results
always come back in input order, never in completion order.
"""

from concurrent.futures import ThreadPoolExecutor
import os

__all__ = ["default_threads", "pmap"]


def default_threads():
    """Thread count from ``GARLING_THREADS`` (default 1)."""
    raw = os.environ.get("GARLING_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"GARLING_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def pmap(fn, items, threads=None):
    items = list(items)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
