"""Kernel backend selection.

Hot loops ship twice: a numba ``@njit`` version and a vectorized numpy
version. The backend is picked once at import time from the
``THATSTREAM_BACKEND`` environment variable (``numba`` or ``numpy``).
If numba cannot be imported the numpy path is used regardless.
"""

import os

BACKEND_ENV = "THATSTREAM_BACKEND"

try:
    from numba import njit as _numba_njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False
    _numba_njit = None

_requested = os.environ.get(BACKEND_ENV, "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {_requested!r}")

USE_NUMBA = NUMBA_AVAILABLE and _requested == "numba"
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(fn):
    """Compile ``fn`` with numba when available, else return it unchanged."""
    if NUMBA_AVAILABLE:
        return _numba_njit(cache=True, nogil=True)(fn)
    return fn
