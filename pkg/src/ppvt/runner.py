"""Deterministic fan-out of per-replication work.

Every estimator in this package derives replication ``i`` entirely from
``(seed, i)``, so the work can be sliced across threads freely: results are
written into slot ``i`` of a preallocated list and the aggregate is
independent of scheduling.  Thread count comes from the environment
(``PPVT_THREADS``) unless given explicitly; the serial path is the default
on single-core hosts.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

from ._backend import thread_count

__all__ = ["run_replications"]

T = TypeVar("T")

_MIN_PARALLEL = 64  # below this, thread startup dominates


def run_replications(fn: Callable[[int], T], n_rep: int, threads: int | None = None) -> list[T]:
    """Evaluate ``fn(0) .. fn(n_rep - 1)`` and return results in order."""
    if n_rep < 0:
        raise ValueError(f"n_rep must be nonnegative, got {n_rep}")
    if threads is None:
        threads = thread_count()
    elif threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    results: list[T] = [None] * n_rep  # type: ignore[list-item]
    if threads == 1 or n_rep < _MIN_PARALLEL:
        for i in range(n_rep):
            results[i] = fn(i)
        return results

    n_chunks = min(n_rep, threads * 8)
    bounds = [(k * n_rep) // n_chunks for k in range(n_chunks + 1)]

    def work(chunk: int) -> None:
        for i in range(bounds[chunk], bounds[chunk + 1]):
            results[i] = fn(i)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(work, range(n_chunks)))
    return results
