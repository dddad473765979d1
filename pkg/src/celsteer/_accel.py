"""Backend selection for the numeric kernels.

Numba is used when it imports cleanly and ``CELSTEER_DISABLE_NUMBA`` is not
set to a truthy value. Otherwise the pure-numpy kernels are used.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}


def numba_requested() -> bool:
    return os.environ.get("CELSTEER_DISABLE_NUMBA", "").strip().lower() in _FALSY


try:
    if not numba_requested():
        raise ImportError("numba disabled by CELSTEER_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        # bare @njit and @njit(...) both reduce to the identity
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrapper(func):
            return func

        return wrapper


BACKEND = "numba" if HAVE_NUMBA else "numpy"
