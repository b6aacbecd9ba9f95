"""Runtime backend and worker-thread selection.

Two env vars steer execution:

* ``PPVT_BACKEND`` -- ``auto`` (default), ``numba``, or ``numpy``.  ``auto``
  compiles the hot kernels with numba when it is importable and falls back to
  vectorized numpy otherwise; ``numpy`` forces the fallback; ``numba``
  requires numba and raises if it cannot be imported.
* ``PPVT_THREADS`` -- caps worker parallelism for replication loops
  (0 or unset = auto).
"""
from __future__ import annotations

import os

_VALID_BACKENDS = ("auto", "numba", "numpy")


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except Exception:
        return False
    return True


def requested_backend() -> str:
    mode = os.environ.get("PPVT_BACKEND", "auto").strip().lower()
    if mode not in _VALID_BACKENDS:
        raise ValueError(
            f"PPVT_BACKEND={mode!r} is not valid; expected one of {_VALID_BACKENDS}"
        )
    return mode


def use_numba() -> bool:
    """Decide, once per process at kernel-import time, whether to JIT."""
    mode = requested_backend()
    if mode == "numpy":
        return False
    if mode == "numba":
        if not numba_available():
            raise RuntimeError(
                "PPVT_BACKEND=numba but numba is not importable; "
                "install the 'accel' extra or unset PPVT_BACKEND"
            )
        return True
    return numba_available()


def thread_count() -> int:
    """Resolve PPVT_THREADS: 0/unset means auto (cpu count capped at 4)."""
    raw = os.environ.get("PPVT_THREADS", "0").strip()
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PPVT_THREADS={raw!r} is not an integer") from None
    if n < 0:
        raise ValueError("PPVT_THREADS must be >= 0")
    if n == 0:
        return min(4, os.cpu_count() or 1)
    return n
