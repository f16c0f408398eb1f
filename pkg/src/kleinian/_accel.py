"""Optional numba acceleration.

Set ``KLEINIAN_DISABLE_NUMBA=1`` to run every kernel as plain Python/numpy.
The kernels are written in the subset of Python that numba understands, so
both paths execute the same source.
"""
import os

_disabled = os.environ.get("KLEINIAN_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    import numba as _nb
except ImportError:  # pragma: no cover - depends on environment
    _nb = None

USE_NUMBA = _nb is not None


def njit(fn):
    """Compile ``fn`` with numba when enabled, otherwise return it unchanged."""
    if USE_NUMBA:
        return _nb.njit(cache=True, nogil=True)(fn)
    return fn


def backend():
    return "numba" if USE_NUMBA else "python"
