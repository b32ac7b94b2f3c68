"""z-slab partitioning shared by the grid kernels.

Chunk boundaries depend only on the grid, never on the worker count, so a
computation split across any number of threads performs exactly the same
floating-point operations.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

ROWS_PER_CHUNK = 16


def chunks(nz, rows=ROWS_PER_CHUNK):
    return [(k0, min(k0 + rows, nz)) for k0 in range(0, nz, rows)]


def map_chunks(fn, nz, workers=1, rows=ROWS_PER_CHUNK):
    """Apply ``fn(k0, k1)`` to every chunk and return results in chunk order."""
    spans = chunks(nz, rows)
    if workers <= 1 or len(spans) == 1:
        return [fn(k0, k1) for k0, k1 in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda span: fn(*span), spans))


def rows_with_halo(arr, k0, k1, halo, axis):
    """Rows ``k0 - halo .. k1 + halo`` of a periodic axis."""
    n = arr.shape[axis]
    idx = np.arange(k0 - halo, k1 + halo) % n
    return np.take(arr, idx, axis=axis)
