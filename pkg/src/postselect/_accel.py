"""Backend selection for the hot kernels.

Kernels are compiled with numba when it is importable, unless the environment
variable ``POSTSELECT_NO_NUMBA`` is set to a non-empty value other than ``0``.
Both paths produce the same numbers; the flag only trades speed for start-up
time (and lets the pure-numpy reference be exercised in tests).
"""
import os

_flag = os.environ.get("POSTSELECT_NO_NUMBA", "")
DISABLED = bool(_flag) and _flag != "0"

try:
    if DISABLED:
        raise ImportError("numba disabled by POSTSELECT_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


def backend():
    return "numba" if HAVE_NUMBA else "numpy"
