"""Numba switch.

Set ``IMBTEXT_DISABLE_NUMBA=1`` to run every kernel through its pure numpy
path, e.g. for debugging or for platforms without an LLVM toolchain.
"""

import os

_disabled = os.environ.get("IMBTEXT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    from numba import njit
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper


def backend():
    return "numba" if HAS_NUMBA else "numpy"
