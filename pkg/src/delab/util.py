"""Small shared utilities: worker-pool sizing and stable reductions."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def worker_count() -> int:
    """Worker cap from DELAB_THREADS (0 or unset means auto)."""
    raw = os.environ.get("DELAB_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(os.cpu_count() or 1, 4)
    return n


def parallel_map(fn, items):
    """Map fn over items, possibly in parallel, with deterministic order.

    Results are collected by index so the reduction order never depends on
    scheduling.  DELAB_THREADS=1 forces a serial loop.
    """
    items = list(items)
    nw = worker_count()
    if nw <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=nw) as pool:
        return list(pool.map(fn, items))


def power_norm(values: np.ndarray, weights: np.ndarray, p: float) -> float:
    """(sum w |v|^p)^(1/p), rescaled so large p does not overflow."""
    v = np.abs(np.asarray(values, dtype=float))
    m = float(v.max(initial=0.0))
    if m == 0.0:
        return 0.0
    s = float(np.sum(weights * (v / m) ** p))
    return m * s ** (1.0 / p)
