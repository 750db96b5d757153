"""Backend selection for the hot numeric kernels.

Numba JIT compilation is used by default. Setting the environment variable
``SODSIM_DISABLE_NUMBA=1`` (before import) selects the pure-numpy/Python
fallback path instead; both backends compute identical results.
"""

import os

_DISABLE = os.environ.get("SODSIM_DISABLE_NUMBA", "0").lower() in ("1", "true", "yes")

if not _DISABLE:
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False


def maybe_njit(func):
    """Compile func with numba when the numba backend is active.

    Kernels release the GIL so the experiment harness can fan replications
    out across threads."""
    if NUMBA_ENABLED:
        return _njit(cache=True, nogil=True)(func)
    return func
