"""Optional numba acceleration.

Set ``SELECTION_LAB_DISABLE_NUMBA=1`` to force the pure-numpy kernels even
when numba is importable.
"""
import os

_DISABLED = os.environ.get("SELECTION_LAB_DISABLE_NUMBA", "").strip().lower() in (
    "1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by environment")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func
        return decorator


BACKEND = "numba" if HAVE_NUMBA else "numpy"
