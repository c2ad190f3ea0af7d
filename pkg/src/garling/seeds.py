"""Seeds ``(f, eta)``: the vectors ``u_{m,n}``, tail quantities ``E_m``,
block sequences and fundamental functions.

For a seed with coefficients ``a_1, a_2, ...`` and positioning ``eta``,
``u_{m,n} = sum_{j<=m} a_j e_{pi_n(j)}``.  The tail ``E_m`` is evaluated as
the Garling norm of ``sum_{j>m} a_j e_{q_j}`` with ``q = q_sequence(eta)``;
only the relative order of the ``q_j`` matters, and that order is
``placement_order(eta, J)``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .kernels import garling_dp
from .norms import NormValue, garling_power
from .positioning import Positioning, pi_prefix, placement_order, q_sequence
from .vectors import SparseVector
from .weights import CACHE_LIMIT

__all__ = [
    "FiniteCoefficients",
    "PowerCoefficients",
    "Seed",
    "BlockSequence",
    "u_vector",
    "e_tail",
    "e_direct",
    "e_zero",
    "e_limit",
    "block_sequence",
    "block_sequence_Q",
    "fundamental_function",
    "tiled_garling",
    "lorentz_tiled_upper",
    "perturbation_gaps",
    "EXACT_LIMIT",
]

# largest tiled support evaluated exactly by the O(M^2) dynamic program
EXACT_LIMIT = 1 << 15


class FiniteCoefficients:
    """An explicit finite coefficient list ``a_1, ..., a_L``."""

    kind = "finite"

    def __init__(self, coefs):
        arr = np.array([float(c) for c in coefs], dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.flags.writeable = False
        self._a = arr

    @property
    def length(self):
        return self._a.shape[0]

    def values(self, n):
        """``a_1, ..., a_n`` padded with zeros past the end."""
        n = int(n)
        if n <= self.length:
            return self._a[:n]
        return np.concatenate([self._a, np.zeros(n - self.length)])

    def tail_power_bound(self, J, p):
        """``sum_{j>J} |a_j|**p`` (exact for a finite list)."""
        return math.fsum(np.abs(self._a[int(J):]) ** p)

    def is_nonincreasing(self):
        return bool(np.all(self._a >= 0)) and bool(np.all(np.diff(self._a) <= 0))

    def to_doc(self):
        return {"kind": "finite", "coefs": self._a.tolist()}


class PowerCoefficients:
    """``a_j = c * j**-beta``, with tail ``sum_{j>J} |a_j|**p <= |c|**p J**(1-beta p)/(beta p-1)``."""

    kind = "power"
    length = None

    def __init__(self, c, beta):
        self.c = float(c)
        self.beta = float(beta)
        if not (math.isfinite(self.c) and self.beta > 0.0):
            raise ValueError("need a finite c and beta > 0")

    def values(self, n):
        return self.c * np.arange(1, int(n) + 1, dtype=np.float64) ** -self.beta

    def _check(self, p):
        if not self.beta * p > 1.0:
            raise ValueError(f"no tail certificate: beta * p = {self.beta * p} <= 1")

    def tail_power_bound(self, J, p):
        self._check(p)
        J = int(J)
        if J < 1:
            # a_1 term plus the integral tail from 1
            return abs(self.c) ** p * (1.0 + 1.0 / (self.beta * p - 1.0))
        return abs(self.c) ** p * J ** (1.0 - self.beta * p) / (self.beta * p - 1.0)

    def truncation(self, p, tol, max_terms):
        """Smallest ``J`` whose tail keeps a norm enclosure narrower than ``tol``."""
        self._check(p)
        if p >= 1.0:
            budget = tol ** p
        else:
            # width <= (1/p) S**((1-p)/p) T with S the total p-mass
            mass = self.tail_power_bound(0, p)
            budget = tol * p / mass ** ((1.0 - p) / p)
        if self.c == 0.0:
            return 1
        r = self.beta * p - 1.0
        J = math.ceil((abs(self.c) ** p / (r * budget)) ** (1.0 / r))
        return max(1, min(J, int(max_terms)))

    def is_nonincreasing(self):
        return self.c >= 0.0

    def to_doc(self):
        return {"kind": "power", "c": self.c, "beta": self.beta}


class Seed:
    """A coefficient family paired with a positioning."""

    def __init__(self, f, eta=None):
        if isinstance(f, (list, tuple, np.ndarray)):
            f = FiniteCoefficients(f)
        self.f = f
        self.eta = eta if eta is not None else Positioning.trivial()
        if isinstance(f, FiniteCoefficients) and self.eta.length is not None:
            if self.eta.length < f.length:
                raise ValueError("explicit positioning is shorter than the coefficient list")

    @classmethod
    def unit(cls):
        """The seed ``f = e_1`` with the trivial positioning."""
        return cls(FiniteCoefficients([1.0]), Positioning.trivial())

    @property
    def finite(self):
        return isinstance(self.f, FiniteCoefficients)

    @property
    def length(self):
        return self.f.length

    @property
    def proper(self):
        return self.f.values(1)[0] != 0.0

    def coefficients(self, n):
        return self.f.values(n)

    def truncation(self, p, tol=1e-9, max_terms=4096):
        if self.finite:
            return self.length
        return self.f.truncation(p, tol, max_terms)

    def ordered_coefficients(self, lo, hi):
        """``a_j`` for ``lo < j <= hi`` listed by increasing ``q_j``."""
        order = np.asarray(placement_order(self.eta, hi), dtype=np.int64)
        a = self.f.values(hi)
        keep = order[order > lo]
        return a[keep - 1]

    def to_doc(self):
        return {"f": self.f.to_doc(), "eta": self.eta.to_doc()}

    @classmethod
    def from_doc(cls, doc):
        if not isinstance(doc, dict) or "f" not in doc:
            raise ValueError("seed document needs an 'f' field")
        fdoc = doc["f"]
        kind = fdoc.get("kind") if isinstance(fdoc, dict) else None
        if kind == "finite":
            f = FiniteCoefficients(fdoc.get("coefs", []))
        elif kind == "power":
            f = PowerCoefficients(fdoc.get("c", 1.0), fdoc.get("beta"))
        else:
            raise ValueError(f"unknown coefficient family {kind!r}")
        eta = Positioning.from_doc(doc.get("eta", {"kind": "trivial"}))
        return cls(f, eta)

    def __repr__(self):
        return f"Seed({self.f.to_doc()}, {self.eta.spec()})"


@dataclass(frozen=True)
class BlockSequence:
    """Consecutive, disjointly supported blocks generated by a seed."""

    blocks: tuple
    offsets: tuple
    kind: str

    def __len__(self):
        return len(self.blocks)

    def concatenation(self, n=None):
        blocks = self.blocks if n is None else self.blocks[:n]
        pos = [q for b in blocks for q in b.positions]
        coefs = np.concatenate([b.coefs for b in blocks]) if blocks else np.empty(0)
        return SparseVector._trusted(pos, coefs)


# -- u vectors and tails ------------------------------------------------------

def u_vector(seed, m, n):
    """``u_{m,n} = sum_{j<=m} a_j e_{pi_n(j)}``, supported in ``{1..n}``."""
    m, n = int(m), int(n)
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    pi = pi_prefix(seed.eta, n).forward
    a = seed.coefficients(m)
    return SparseVector((pi[j], a[j]) for j in range(m))


def _tail_interval(lower, tail_mass, p):
    if tail_mass <= 0.0:
        return NormValue.exact(lower)
    if p >= 1.0:
        return NormValue(lower, lower + tail_mass ** (1.0 / p))
    return NormValue(lower, (lower ** p + tail_mass) ** (1.0 / p))


def e_tail(seed, m, w, p, tol=1e-9, max_terms=4096):
    """``E_m`` as the Garling norm of ``sum_{j>m} a_j e_{q_j}``.

    Finite seeds give an exact value.  Power-law seeds are truncated at the
    smallest ``J`` meeting ``tol`` (capped by ``max_terms``) and the tail is
    added as a certified enclosure.
    """
    m = int(m)
    if m < 0:
        raise ValueError("m must be non-negative")
    J = seed.truncation(p, tol, max_terms)
    if m >= J:
        if seed.finite:
            return NormValue.exact(0.0)
        return _tail_interval(0.0, seed.f.tail_power_bound(m, p), p)
    s = garling_power(seed.ordered_coefficients(m, J), w, p)
    lower = s ** (1.0 / p)
    if seed.finite:
        return NormValue.exact(lower)
    return _tail_interval(lower, seed.f.tail_power_bound(J, p), p)


def e_zero(seed, w, p, **kwargs):
    return e_tail(seed, 0, w, p, **kwargs)


def e_direct(seed, m, w, p):
    """``max_{m <= n <= L} ||u_n - u_{m,n}||`` straight from the definition (finite seeds)."""
    if not seed.finite:
        raise ValueError("the direct supremum needs a finite seed")
    L = seed.length
    m = int(m)
    best = 0.0
    a = seed.coefficients(L)
    for n in range(max(m, 1), L + 1):
        pi = pi_prefix(seed.eta, n).forward
        coefs = np.zeros(n)
        for j in range(m, n):
            coefs[pi[j] - 1] = a[j]
        best = max(best, garling_power(coefs, w, p))
    return best ** (1.0 / p)


def e_limit(seed, w, p, tol=1e-9, max_terms=4096):
    """``(m, E_m)`` at the largest index this artifact evaluates.

    ``E_m`` is non-increasing in ``m``; the enclosure at the truncation level
    bounds every later ``E_m`` from above.
    """
    J = seed.truncation(p, tol, max_terms)
    return J, e_tail(seed, J, w, p, tol=tol, max_terms=max_terms)


def perturbation_gaps(seed, mu, w, p, **kwargs):
    """Gaps ``E_{m_k}`` (upper ends) and partial sums of ``E_{m_k}**min(1, p)``."""
    pbar = min(1.0, float(p))
    gaps = [e_tail(seed, m, w, p, **kwargs).upper for m in mu]
    partial = np.cumsum([g ** pbar for g in gaps]).tolist()
    return gaps, partial


# -- block sequences ----------------------------------------------------------

def block_sequence(seed, nu, K):
    """First ``K`` blocks ``u_{n_k}`` translated by ``n_1 + ... + n_{k-1}``."""
    if not seed.proper:
        raise ValueError("block sequences need a proper seed (a_1 != 0)")
    nu = [int(v) for v in nu]
    K = int(K)
    if K < 0 or len(nu) < K:
        raise ValueError(f"need at least K={K} terms of nu")
    if any(v < 1 for v in nu) or any(b <= a for a, b in zip(nu, nu[1:])):
        raise ValueError("nu must be a strictly increasing sequence of positive integers")
    blocks, offsets = [], []
    offset = 0
    for k in range(K):
        blocks.append(u_vector(seed, nu[k], nu[k]).translate(offset))
        offsets.append(offset)
        offset += nu[k]
    return BlockSequence(tuple(blocks), tuple(offsets), "nu")


def block_sequence_Q(seed, K, tol=1e-9, max_terms=4096, p=1.0):
    """First ``K`` blocks ``sum_n a_n e_{k-1+q_n}``; power-law seeds are truncated."""
    K = int(K)
    if K < 0:
        raise ValueError("K must be non-negative")
    J = seed.truncation(p, tol, max_terms)
    q = q_sequence(seed.eta, J)
    a = seed.coefficients(J)
    base = SparseVector(zip(q, a))
    blocks = tuple(base.translate(k) for k in range(K))
    return BlockSequence(blocks, tuple(range(K)), "Q")


# -- fundamental functions ----------------------------------------------------

def tiled_garling(ordered, copies, w, p, exact_limit=EXACT_LIMIT):
    """Norm of ``copies`` consecutive copies of a block with coefficients ``ordered``.

    Exact while the tiled support fits ``exact_limit``.  Larger cases return a
    certified enclosure: the lower end is an exact norm of a sub-family (fewer
    copies, or the largest coordinates of every copy), the upper end is the
    smaller of the Lorentz bound and ``copies**(1/p) * ||block||``.
    """
    p = float(p)
    a = np.abs(np.asarray(ordered, dtype=np.float64))
    a = a[a != 0.0]
    copies = int(copies)
    M = a.shape[0]
    if M == 0 or copies <= 0:
        return NormValue.exact(0.0)
    vals = a ** p
    if M * copies <= exact_limit:
        s = garling_dp(np.tile(vals, copies), w.values(M * copies))
        return NormValue.exact(s ** (1.0 / p))

    lower = 0.0
    fewer = exact_limit // M
    if fewer >= 1:
        lower = garling_dp(np.tile(vals, fewer), w.values(M * fewer))
    keep = exact_limit // copies
    if keep >= 1:
        idx = np.sort(np.argsort(-vals, kind="stable")[:keep])
        sub = vals[idx]
        lower = max(lower, garling_dp(np.tile(sub, copies), w.values(sub.shape[0] * copies)))
    else:
        lo, _ = w.range_sum_bounds(1, copies)
        lower = max(lower, float(vals.max()) * lo)

    upper = lorentz_tiled_upper(vals, copies, w)
    if M <= exact_limit:
        upper = min(upper, copies * garling_dp(vals, w.values(M)) * (1 + 1e-15))
    upper = max(upper, lower)
    return NormValue(lower ** (1.0 / p), upper ** (1.0 / p))


def lorentz_tiled_upper(vals, copies, w):
    """Upper bound on the Lorentz p-power sum of ``copies`` tiles of ``vals`` (already ``|a|**p``).

    In the rearrangement the ``j``-th largest value fills slots
    ``(j-1)c+1 .. jc``.
    """
    srt = -np.sort(-np.asarray(vals, dtype=np.float64))
    M = srt.shape[0]
    N = M * copies
    if N <= CACHE_LIMIT:
        sums = np.asarray(w.prefix_sums(N))
        cuts = sums[np.arange(M + 1) * copies]
        slack = 4e-16 * float(sums[-1]) * float(srt.sum())
        return math.fsum(srt * np.diff(cuts)) + slack
    upper = 0.0
    for j, v in enumerate(srt.tolist()):
        _, hi = w.range_sum_bounds(j * copies + 1, (j + 1) * copies)
        upper += v * hi
    return upper


def fundamental_function(seed, n, w, p, tol=1e-9, max_terms=4096, exact_limit=EXACT_LIMIT):
    """``Phi(n)``: norm of the first ``n`` blocks of :func:`block_sequence_Q`."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    J = seed.truncation(p, tol, max_terms)
    core = tiled_garling(seed.ordered_coefficients(0, J), n, w, p, exact_limit)
    if seed.finite:
        return core
    # the truncated blocks are a projection; the tails add at most n * T in p-power
    tail = n * seed.f.tail_power_bound(J, p)
    if p >= 1.0:
        return NormValue(core.lower, core.upper + tail ** (1.0 / p))
    return NormValue(core.lower, (core.upper ** p + tail) ** (1.0 / p))
