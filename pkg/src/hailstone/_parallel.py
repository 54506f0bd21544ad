"""Deterministic chunked execution over integer ranges.

Chunks have a fixed size that does not depend on the worker count and
results are merged in chunk order, so output is identical for any number
of workers.
"""
from concurrent.futures import ProcessPoolExecutor

DEFAULT_CHUNK = 1 << 18


def chunk_bounds(start, stop, chunk=DEFAULT_CHUNK):
    bounds = []
    lo = start
    while lo < stop:
        hi = min(lo + chunk, stop)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def map_chunks(func, tasks, workers=1):
    """Apply ``func`` to each task tuple, returning results in task order."""
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [func(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, *zip(*tasks)))
