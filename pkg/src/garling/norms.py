"""Garling, Lorentz, lp and sup norms of finitely supported vectors."""

from dataclasses import dataclass
import math

import numpy as np

from .kernels import garling_dp
from .vectors import SparseVector

__all__ = [
    "NormValue",
    "garling_norm",
    "garling_power",
    "garling_norm_bruteforce",
    "lorentz_norm",
    "lorentz_power",
    "lp_norm",
    "sup_norm",
    "nonincreasing_rearrangement",
    "tail_weight_modulus",
    "BRUTEFORCE_LIMIT",
]

BRUTEFORCE_LIMIT = 20


@dataclass(frozen=True)
class NormValue:
    """A norm known to lie in ``[lower, upper]``."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper):
            raise ValueError(f"invalid enclosure [{self.lower}, {self.upper}]")

    @classmethod
    def exact(cls, value):
        value = float(value)
        return cls(value, value)

    @property
    def value(self):
        """Midpoint of the enclosure (the value itself when exact)."""
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self):
        return self.upper - self.lower

    def is_exact(self, rtol=1e-12):
        return self.width <= rtol * max(1.0, self.upper)

    def __float__(self):
        return self.value


def _check_p(p):
    p = float(p)
    if not (p > 0.0 and math.isfinite(p)):
        raise ValueError(f"p must be a positive finite number, got {p}")
    return p


def _coefs(x):
    if isinstance(x, SparseVector):
        return x.coefs
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional coefficient array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    return arr


def _root(s, p):
    return s if p == 1.0 else s ** (1.0 / p)


def garling_power(coefs, w, p):
    """``||x||_g ** p`` for coefficients listed in increasing position order.

    Zero coefficients may be present; they never help a selection.
    """
    p = _check_p(p)
    a = np.abs(_coefs(coefs))
    a = a[a != 0.0]
    if a.shape[0] == 0:
        return 0.0
    vals = a if p == 1.0 else a ** p
    return garling_dp(vals, w.values(a.shape[0]))


def garling_norm(x, w, p):
    """Garling norm of a finitely supported vector as an exact :class:`NormValue`.

    The supremum over increasing selections of support positions is found by
    dynamic programming over (support index, slots used), ``O(M**2)`` for
    support size ``M``.
    """
    return NormValue.exact(_root(garling_power(x, w, p), _check_p(p)))


def garling_norm_bruteforce(x, w, p, chunk=1 << 14):
    """Garling norm by enumerating every subset of the support.

    Independent of the dynamic program; limited to ``BRUTEFORCE_LIMIT``
    support points.
    """
    p = _check_p(p)
    a = np.abs(_coefs(x))
    a = a[a != 0.0]
    m = a.shape[0]
    if m > BRUTEFORCE_LIMIT:
        raise ValueError(f"support of size {m} is too large for enumeration (max {BRUTEFORCE_LIMIT})")
    if m == 0:
        return 0.0
    vals = a ** p
    wv = np.asarray(w.values(m))
    bits = np.arange(m, dtype=np.int64)
    best = 0.0
    for start in range(0, 1 << m, chunk):
        masks = np.arange(start, min(start + chunk, 1 << m), dtype=np.int64)
        chosen = (masks[:, None] >> bits) & 1
        # slot of each chosen coordinate = number of chosen coordinates before it
        slot = np.cumsum(chosen, axis=1) - 1
        terms = np.where(chosen == 1, vals * wv[np.clip(slot, 0, m - 1)], 0.0)
        best = max(best, float(terms.sum(axis=1).max()))
    return _root(best, p)


def nonincreasing_rearrangement(values):
    """Moduli of ``values`` sorted in non-increasing order."""
    a = np.abs(np.asarray(values, dtype=np.float64))
    return -np.sort(-a, kind="stable")


def lorentz_power(coefs, w, p):
    p = _check_p(p)
    a = nonincreasing_rearrangement(_coefs(coefs))
    a = a[a != 0.0]
    if a.shape[0] == 0:
        return 0.0
    vals = a if p == 1.0 else a ** p
    return math.fsum(vals * w.values(a.shape[0]))


def lorentz_norm(x, w, p):
    """Weighted Lorentz norm ``(sum_j (a*_j)**p w_j)**(1/p)``."""
    return _root(lorentz_power(x, w, p), _check_p(p))


def lp_norm(x, p):
    p = _check_p(p)
    a = np.abs(_coefs(x))
    if a.shape[0] == 0:
        return 0.0
    return _root(math.fsum(a ** p), p)


def sup_norm(x):
    a = np.abs(_coefs(x))
    return float(a.max()) if a.shape[0] else 0.0


def tail_weight_modulus(y, w, p, eps, cap=1 << 22):
    """Smallest ``M`` with ``w_M * sum_q |a_q|**p < eps**p / 2``.

    Any increasing selection then satisfies
    ``sum_i |a_{q_i}|**p w_{M+i-1} < eps**p``; this is re-checked with a
    dynamic program on the shifted weights before returning.
    """
    p = _check_p(p)
    eps = float(eps)
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    a = np.abs(_coefs(y))
    a = a[a != 0.0]
    if a.shape[0] == 0:
        return 1
    mass = math.fsum(a ** p)
    target = eps ** p / 2.0
    n = 64
    while True:
        wv = np.asarray(w.values(n))
        hits = np.flatnonzero(wv * mass < target)
        if hits.size:
            M = int(hits[0]) + 1
            break
        if n >= cap:
            raise ValueError(f"no admissible M below {cap}")
        n = min(2 * n, cap)
    shifted = np.asarray(w.values(M - 1 + a.shape[0]))[M - 1:]
    if not garling_dp(a ** p, shifted) < eps ** p:
        raise ArithmeticError("shifted-weight check failed")
    return M
