"""Numba backend selection for the hot kernels.

The package runs with two interchangeable kernel implementations: a numba
``@njit`` loop version and a vectorized pure-numpy version.  The numba path is
used when numba imports successfully and the environment variable
``DCESIM_NUMBA`` is unset or truthy; setting ``DCESIM_NUMBA=0`` forces the
numpy fallback (useful for debugging and for the benchmark in
``benchmarks/rhs_benchmark.py``).
"""

from __future__ import annotations

import os


def _env_allows_numba() -> bool:
    value = os.environ.get("DCESIM_NUMBA", "1").strip().lower()
    return value not in ("0", "false", "off", "no")


def _import_numba():
    if not _env_allows_numba():
        return None
    try:
        import numba
    except ImportError:
        return None
    return numba


_NUMBA = _import_numba()
HAVE_NUMBA = _NUMBA is not None

if HAVE_NUMBA:
    njit = _NUMBA.njit
else:

    def njit(*args, **kwargs):
        """No-op replacement for numba.njit when the fallback path is active."""
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if HAVE_NUMBA else "numpy"
