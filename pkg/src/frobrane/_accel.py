"""Optional numba acceleration.

Set ``FROBRANE_NUMBA=0`` to force the pure-numpy kernels even when numba is
installed. The flag is read once, at import time.
"""

import os

_FLAG = os.environ.get("FROBRANE_NUMBA", "1").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - depends on environment
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and _FLAG not in ("0", "false", "no", "off")


def njit(*args, **kwargs):
    """``numba.njit`` with caching on; identity decorator without numba."""
    kwargs.setdefault("cache", True)
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)
