"""JIT switch for the numeric kernels.

Set ``TRAPKIT_NUMBA=0`` to run every kernel as plain Python over numpy
arrays (slow, but needs nothing beyond numpy).  The flag is read once at
import time.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("TRAPKIT_NUMBA", "1") != "0"


def jit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def backend():
    return "numba" if USE_NUMBA else "numpy"
