"""Worker-process environment pinning.

This module must stay free of numpy (and of any module that imports it):
process-pool workers reference :func:`pin_thread_env` as their initializer,
and unpickling that reference imports only this module.  The initializer
therefore runs before any task payload pulls in the numeric stack, so the
thread-count variables below are in force when the BLAS runtime starts.
Single-threaded kernels make floating-point reductions independent of the
worker count, which the report format relies on (byte-identical payloads).
"""

from __future__ import annotations

import os

PINNED_THREAD_VARS = (
    "OPENBLAS_NUM_THREADS",
    "OMP_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
)


def pin_thread_env() -> None:
    """Force single-threaded numeric kernels in the calling process."""
    for name in PINNED_THREAD_VARS:
        os.environ[name] = "1"
