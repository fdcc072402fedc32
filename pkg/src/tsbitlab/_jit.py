"""Select numba or plain-Python execution for the hot kernels.

Set ``TSBITLAB_DISABLE_NUMBA=1`` to run every kernel as ordinary Python
(useful for debugging and for comparing against the compiled path).
"""

import os

_DISABLED = os.environ.get("TSBITLAB_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:
    _njit = None
    HAVE_NUMBA = False


def jit(func):
    """Compile ``func`` with numba when enabled, otherwise return it unchanged.

    The original function stays reachable as ``func.py_func`` either way so
    tests and benchmarks can run both paths side by side.
    """
    if HAVE_NUMBA:
        return _njit(cache=True, nogil=True)(func)
    func.py_func = func
    return func
