"""Keyed random substreams.

Every unit of random work (a simulated replicate, a bootstrap iteration, a
subset draw) gets its own generator derived from ``(seed, *key)``, so results
never depend on the order in which units are executed.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DomainError

# stream tags, one per consumer of randomness
SMITH = 1
LOGISTIC = 2
GAUSS = 3
SUBSETS = 10
BOOTSTRAP = 11

_SEED_LIMIT = 2**64


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def substream(seed, *key):
    """Return an independent generator for ``key`` under ``seed``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def chunked_map(func, n_items, n_jobs=1, chunk=256):
    """Apply ``func(start, stop)`` over ``range(n_items)`` in chunks.

    Results come back in index order whatever ``n_jobs`` is.
    """
    bounds = [(i, min(i + chunk, n_items)) for i in range(0, n_items, chunk)]
    if n_jobs is None or n_jobs <= 1 or len(bounds) <= 1:
        return [func(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(lambda ab: func(*ab), bounds))
