"""JIT switch for the numeric kernels.

Kernels are written in the numba-compatible subset of Python/numpy.  When
numba is importable they are compiled with ``@njit``; setting the environment
variable ``UDLAB_DISABLE_NUMBA=1`` (or running without numba installed) makes
``njit`` a no-op so the very same functions run as plain numpy code.
"""

import os

DISABLED = os.environ.get("UDLAB_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None and not DISABLED


def njit(*args, **kwargs):
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(fn):
        return fn

    return wrap


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
