"""Select numba or plain numpy for the hot loops.

Set ``FOCKSE_DISABLE_NUMBA=1`` before import to run every kernel as ordinary
Python/numpy.  Both variants stay importable so they can be benchmarked
against each other.
"""
import os

DISABLED = os.environ.get("FOCKSE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and not DISABLED


def njit(*args, **kwargs):
    """``numba.njit(cache=True, nogil=True)`` when available, identity otherwise."""
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)

    def wrap(fn):
        if numba is None:
            return fn
        return numba.njit(**kwargs)(fn)

    if len(args) == 1 and callable(args[0]):
        return wrap(args[0])
    return wrap
