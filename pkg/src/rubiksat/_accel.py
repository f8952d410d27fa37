"""Optional numba acceleration.

Hot kernels are written in a numba-compatible subset of Python and decorated
with :func:`kernel`.  Set ``RUBIKSAT_NO_NUMBA=1`` (or uninstall numba) to run
the same kernels as plain Python; callers then take their fallback paths.
"""
import os

_DISABLED = os.environ.get("RUBIKSAT_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by RUBIKSAT_NO_NUMBA")
    from numba import njit as _njit

    USE_NUMBA = True
except ImportError:
    _njit = None
    USE_NUMBA = False


def kernel(fn):
    if USE_NUMBA:
        return _njit(cache=True, nogil=True)(fn)
    return fn


def backend_name() -> str:
    return "numba" if USE_NUMBA else "python"
