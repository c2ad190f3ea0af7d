"""Hot numeric kernels.

Every kernel has a numba implementation (``*_numba``) and a vectorised numpy
implementation (``*_numpy``); the public name dispatches on
:data:`garling._accel.BACKEND`.  Both paths are kept in sync by
``tests/test_kernels.py`` and compared for speed in ``benchmarks/``.
"""

import numpy as np

from ._accel import BACKEND, njit

__all__ = [
    "garling_dp",
    "garling_dp_numba",
    "garling_dp_numpy",
    "compensated_cumsum",
    "compensated_cumsum_numba",
    "compensated_cumsum_numpy",
    "BACKEND",
]


# -- best weighted increasing selection -------------------------------------
#
# best[t] is the best total using exactly t slots; every total is carried as an
# unevaluated pair hi + lo so that long runs of additions (e.g. unit vectors,
# where the optimum is a plain prefix sum of the weights) keep full precision.

@njit(cache=True, nogil=True)
def garling_dp_numba(vals, w):
    m = vals.shape[0]
    hi = np.full(m + 1, -np.inf)
    lo = np.zeros(m + 1)
    hi[0] = 0.0
    for i in range(m):
        v = vals[i]
        # descending t so slot t - 1 still holds the previous row
        for t in range(i + 1, 0, -1):
            a = hi[t - 1]
            b = v * w[t - 1]
            s = a + b
            bv = s - a
            e = lo[t - 1] + ((a - (s - bv)) + (b - bv))
            if s + e > hi[t] + lo[t]:
                hi[t] = s
                lo[t] = e
    out = 0.0
    for t in range(m + 1):
        tot = hi[t] + lo[t]
        if tot > out:
            out = tot
    return out


def garling_dp_numpy(vals, w):
    m = vals.shape[0]
    hi = np.full(m + 1, -np.inf)
    lo = np.zeros(m + 1)
    hi[0] = 0.0
    for i in range(m):
        a = hi[:i + 1]
        b = vals[i] * w[:i + 1]
        s = a + b
        bv = s - a
        e = lo[:i + 1] + ((a - (s - bv)) + (b - bv))
        better = s + e > hi[1:i + 2] + lo[1:i + 2]
        hi[1:i + 2] = np.where(better, s, hi[1:i + 2])
        lo[1:i + 2] = np.where(better, e, lo[1:i + 2])
    return float(max((hi + lo).max(), 0.0))


def garling_dp(vals, w):
    """Maximum of ``sum_t vals[i_t] * w[t]`` over increasing index selections.

    Parameters
    ----------
    vals : ndarray
        Non-negative values (``|a|**p``) listed in increasing position order.
    w : ndarray
        Weights ``w_1, w_2, ...``; at least ``len(vals)`` entries.

    Returns
    -------
    float
        The optimum ``max_t best(M, t)`` of the recurrence
        ``best(i, t) = max(best(i-1, t), best(i-1, t-1) + vals[i] * w[t])``.
    """
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    if w.shape[0] < vals.shape[0]:
        raise ValueError("need at least as many weights as values")
    if vals.shape[0] == 0:
        return 0.0
    if BACKEND == "numba":
        return float(garling_dp_numba(vals, w))
    return garling_dp_numpy(vals, w)


# -- compensated prefix sums ------------------------------------------------

@njit(cache=True, nogil=True)
def compensated_cumsum_numba(x, s0, c0):
    out = np.empty(x.shape[0])
    s = s0
    c = c0
    for i in range(x.shape[0]):
        v = x[i]
        t = s + v
        # TwoSum: exact rounding error of s + v
        bv = t - s
        c += (s - (t - bv)) + (v - bv)
        s = t
        out[i] = s + c
    return out, s, c


def compensated_cumsum_numpy(x, s0, c0):
    # the naive running sums are what the sequential loop sees, so the exact
    # TwoSum errors of every step can be recovered in one vectorised pass
    if x.shape[0] == 0:
        return np.empty(0), s0, c0
    prev = np.empty(x.shape[0] + 1)
    prev[0] = s0
    prev[1:] = x
    s = np.cumsum(prev)
    a, t = s[:-1], s[1:]
    bv = t - a
    err = (a - (t - bv)) + (x - bv)
    err[0] += c0
    c = np.cumsum(err)
    return t + c, float(t[-1]), float(c[-1])


def compensated_cumsum(x, s0=0.0, c0=0.0):
    """Running sums of ``x`` started from ``s0 + c0`` with error compensation.

    Returns ``(sums, s, c)`` where ``(s, c)`` is the carried state for the
    next block.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if BACKEND == "numba":
        out, s, c = compensated_cumsum_numba(x, float(s0), float(c0))
        return out, float(s), float(c)
    return compensated_cumsum_numpy(x, float(s0), float(c0))
