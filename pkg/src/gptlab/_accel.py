"""Numba switch.

Set ``GPTLAB_NUMBA=0`` to run every kernel through its pure-numpy path.
The flag is read once at import time.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and os.environ.get("GPTLAB_NUMBA", "1") not in ("0", "false", "no")


def njit(func):
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func
