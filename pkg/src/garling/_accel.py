"""Backend selection for the numeric kernels.

Set ``GARLING_BACKEND=numpy`` to force the pure-numpy code path; the default
is ``numba`` whenever numba can be imported.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_requested = os.environ.get("GARLING_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise RuntimeError(f"GARLING_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

HAVE_NUMBA = numba is not None
BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise."""
    if numba is None:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn
    return numba.njit(*args, **kwargs)
