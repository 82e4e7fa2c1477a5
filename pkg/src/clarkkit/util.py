"""Shared numerics and parallel-sweep helpers."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = ["neville_to_zero", "thread_count", "ordered_parallel_map"]


def neville_to_zero(hs: Sequence[float], vs):
    """Polynomial extrapolation of samples v(h_i) to h = 0.

    hs must be distinct and positive; vs entries may be scalars or ndarrays
    (extrapolated componentwise).  Uses the Neville tableau evaluated at 0.
    """
    hs = [float(h) for h in hs]
    if len(hs) != len(set(hs)):
        raise ValueError("extrapolation nodes must be distinct")
    P = [np.asarray(v, dtype=float) * 1.0 for v in vs]
    n = len(P)
    if n == 0:
        raise ValueError("need at least one sample")
    for m in range(1, n):
        for i in range(n - m):
            P[i] = (hs[i] * P[i + 1] - hs[i + m] * P[i]) / (hs[i] - hs[i + m])
    return P[0]


def thread_count() -> int:
    """Worker cap from CLARKKIT_THREADS; 0 or unset means single-threaded auto.

    The compute kernels are deterministic per work item, so the sweep result
    does not depend on the worker count.
    """
    raw = os.environ.get("CLARKKIT_THREADS", "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    if n == 0:
        return os.cpu_count() or 1
    return max(1, n)


def ordered_parallel_map(fn: Callable, items: Iterable) -> list:
    """Map preserving input order, threaded when CLARKKIT_THREADS allows."""
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
