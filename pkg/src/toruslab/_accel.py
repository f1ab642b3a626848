"""Backend selection for the numeric kernels.

Set ``TORUSLAB_DISABLE_NUMBA=1`` to force the pure-numpy code path (useful
when numba is unavailable or for cross-checking the compiled kernels).
"""

import os

_FALSY = ("", "0", "false", "no", "off")

NUMBA_REQUESTED = os.environ.get("TORUSLAB_DISABLE_NUMBA", "").strip().lower() in _FALSY

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

USE_NUMBA = NUMBA_REQUESTED and HAS_NUMBA


def njit(func):
    """Compile ``func`` with numba when available, otherwise return it as-is.

    The uncompiled loop version still runs (slowly) under plain CPython, which
    is what the equivalence tests rely on when numba is missing.
    """
    if not HAS_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
