"""Backend selection for the hot kernels.

Set ``HYBRIDFT_DISABLE_NUMBA=1`` to force the pure-numpy path. Numba is
also skipped silently when it cannot be imported.
"""

import os

_DISABLED = os.environ.get("HYBRIDFT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    import numba
    from numba import njit, prange

    if not os.environ.get("NUMBA_THREADING_LAYER"):
        # avoid probing an outdated TBB
        numba.config.THREADING_LAYER = "workqueue"

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f

    prange = range

_backend = "numba" if HAVE_NUMBA else "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Switch kernels to ``"numba"`` or ``"numpy"``; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is unavailable (missing or disabled by HYBRIDFT_DISABLE_NUMBA)")
    prev, _backend = _backend, name
    return prev


def set_threads(n: int) -> None:
    if HAVE_NUMBA and n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
