"""Backend selection for the hot kernels.

Set ``CRPSTICK_DISABLE_NUMBA=1`` before import to route every dispatcher in
:mod:`crpstick.kernels` to the pure-numpy implementation. The numba variants
remain importable (and compile lazily) whenever numba is installed, so the
two paths can still be compared side by side.
"""

import os

DISABLED = os.environ.get("CRPSTICK_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(func):
    """``numba.njit(cache=True)`` when numba is installed, else ``func`` unchanged."""
    if _njit is None:
        return func
    return _njit(cache=True)(func)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
