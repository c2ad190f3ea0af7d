"""Positionings, their permutation prefixes, dyadic placements and greedy orderings.

A positioning is a sequence ``d_1, d_2, ...`` with ``1 <= d_n <= n``: the
``n``-th coefficient is inserted at rank ``d_n`` among the first ``n``, pushing
every coefficient of rank ``>= d_n`` one step up.  ``pi_n(j)`` is the rank of
coefficient ``j`` after ``n`` insertions.
"""

import bisect
from dataclasses import dataclass
import threading

import numpy as np

from .dyadic import Dyadic
from .vectors import SparseVector

__all__ = [
    "Positioning",
    "PermutationPrefix",
    "GreedyOrdering",
    "pi_prefix",
    "pi_prefixes",
    "placement_order",
    "positioning_from_pi",
    "q_of",
    "q_sequence",
    "positioning_from_ranks",
    "is_compatible",
    "greedy_ordering",
    "greedy_sum",
    "greedy_positioning",
    "greedy_j",
]


class Positioning:
    """A positioning with a lazily realised, thread-safe prefix cache.

    Kinds
    -----
    ``trivial``   ``d_n = n`` (coefficients stay in order)
    ``const1``    ``d_n = 1`` (each new coefficient goes first)
    ``explicit``  a finite list; asking beyond its length is an error
    ``random``    ``d_n`` uniform on ``{1..n}``, drawn in order of ``n`` from
                  ``numpy.random.default_rng(seed)`` (PCG64) via
                  ``integers(1, n + 1)``
    """

    def __init__(self, kind="trivial", d=None, seed=None):
        if kind not in ("trivial", "const1", "explicit", "random"):
            raise ValueError(f"unknown positioning kind {kind!r}")
        self.kind = kind
        self.seed = None
        self._d = []
        self._lock = threading.Lock()
        self._rng = None
        if kind == "explicit":
            if d is None:
                raise ValueError("explicit positioning needs a list d")
            d = [int(v) for v in d]
            for n, v in enumerate(d, start=1):
                if not 1 <= v <= n:
                    raise ValueError(f"d_{n} = {v} is outside 1..{n}")
            self._d = d
        elif kind == "random":
            if seed is None:
                raise ValueError("random positioning needs a seed")
            self.seed = int(seed)
            self._rng = np.random.default_rng(self.seed)

    @classmethod
    def trivial(cls):
        return cls("trivial")

    @classmethod
    def const1(cls):
        return cls("const1")

    @classmethod
    def explicit(cls, d):
        return cls("explicit", d=d)

    @classmethod
    def random(cls, seed):
        return cls("random", seed=seed)

    @property
    def length(self):
        """Number of terms available (``None`` when unbounded)."""
        return len(self._d) if self.kind == "explicit" else None

    def prefix(self, n):
        """The tuple ``(d_1, ..., d_n)``."""
        n = int(n)
        if n < 0:
            raise ValueError("n must be non-negative")
        if self.kind == "trivial":
            return tuple(range(1, n + 1))
        if self.kind == "const1":
            return (1,) * n
        if self.kind == "explicit":
            if n > len(self._d):
                raise ValueError(f"explicit positioning has only {len(self._d)} terms")
            return tuple(self._d[:n])
        if len(self._d) < n:
            with self._lock:
                while len(self._d) < n:
                    k = len(self._d) + 1
                    self._d.append(int(self._rng.integers(1, k + 1)))
        return tuple(self._d[:n])

    def __getitem__(self, n):
        """``d_n`` (1-based)."""
        return self.prefix(n)[n - 1]

    def to_doc(self):
        if self.kind == "explicit":
            return {"kind": "explicit", "d": list(self._d)}
        if self.kind == "random":
            return {"kind": "random", "seed": self.seed}
        return {"kind": self.kind}

    @classmethod
    def from_doc(cls, doc):
        if not isinstance(doc, dict) or "kind" not in doc:
            raise ValueError("positioning document needs a 'kind' field")
        kind = doc["kind"]
        if kind in ("const1", "constant-one"):
            return cls("const1")
        if kind == "explicit":
            return cls("explicit", d=doc.get("d"))
        if kind == "random":
            return cls("random", seed=doc.get("seed"))
        return cls(kind)

    @classmethod
    def parse(cls, text):
        """Parse ``trivial``, ``const1``, ``random:42`` or ``explicit:1,1,3``."""
        kind, _, arg = text.strip().partition(":")
        if kind == "random":
            return cls.random(int(arg))
        if kind == "explicit":
            return cls.explicit([int(v) for v in arg.split(",") if v.strip()])
        if arg:
            raise ValueError(f"cannot parse positioning {text!r}")
        return cls.from_doc({"kind": kind})

    def spec(self):
        if self.kind == "random":
            return f"random:{self.seed}"
        if self.kind == "explicit":
            return "explicit:" + ",".join(map(str, self._d))
        return self.kind

    def __repr__(self):
        return f"Positioning({self.spec()})"


@dataclass(frozen=True)
class PermutationPrefix:
    """``forward[j-1] = pi_n(j)`` and ``inverse[r-1] = pi_n^{-1}(r)``."""

    forward: tuple
    inverse: tuple

    @property
    def n(self):
        return len(self.forward)

    def __post_init__(self):
        n = len(self.forward)
        if sorted(self.forward) != list(range(1, n + 1)):
            raise ValueError("forward is not a permutation of 1..n")
        for j, r in enumerate(self.forward, start=1):
            if self.inverse[r - 1] != j:
                raise ValueError("inverse does not invert forward")


def _as_positioning(eta, n):
    if isinstance(eta, Positioning):
        return eta.prefix(n)
    d = tuple(int(v) for v in eta)
    if len(d) < n:
        raise ValueError(f"positioning has only {len(d)} terms, need {n}")
    return d[:n]


def placement_order(eta, n):
    """Coefficient indices listed by increasing rank: ``pi_n^{-1}(1), ..., pi_n^{-1}(n)``."""
    order = []
    for k, d in enumerate(_as_positioning(eta, n), start=1):
        order.insert(d - 1, k)
    return order


def pi_prefix(eta, n):
    """The permutation ``pi_n`` obtained from ``n`` insertion steps."""
    inverse = placement_order(eta, n)
    forward = [0] * len(inverse)
    for r, j in enumerate(inverse, start=1):
        forward[j - 1] = r
    return PermutationPrefix(tuple(forward), tuple(inverse))


def pi_prefixes(eta, n):
    """``[pi_1, ..., pi_n]`` as forward tuples."""
    d = _as_positioning(eta, n)
    out = []
    forward = []
    for k, dk in enumerate(d, start=1):
        forward = [r + 1 if r >= dk else r for r in forward]
        forward.append(dk)
        out.append(tuple(forward))
    return out


def positioning_from_pi(prefixes):
    """Recover ``(d_n)`` from the prefixes ``pi_1, ..., pi_N``.

    ``d_n`` is the number of ``j <= n`` with ``pi_n(j) <= pi_n(n)``.  The
    prefixes must come from one insertion recursion; otherwise ``ValueError``.
    """
    d = []
    previous = ()
    for n, pi in enumerate(prefixes, start=1):
        pi = tuple(int(v) for v in pi)
        if len(pi) != n:
            raise ValueError(f"prefix {n} has length {len(pi)}")
        if sorted(pi) != list(range(1, n + 1)):
            raise ValueError(f"prefix {n} is not a permutation of 1..{n}")
        dn = sum(1 for r in pi if r <= pi[-1])
        # removing n and closing the gap must give back pi_{n-1}
        if tuple(r - 1 if r > dn else r for r in pi[:-1]) != previous:
            raise ValueError(f"prefix {n} is not an insertion step of prefix {n - 1}")
        d.append(dn)
        previous = pi
    return Positioning.explicit(d)


def q_sequence(eta, n):
    """Dyadic placements ``q_1, ..., q_n`` in ``(0, 1)`` compatible with ``eta``.

    ``q_n`` is the midpoint of its two neighbours in rank order, with the
    conventions ``q_0 = 0`` (no lower neighbour) and ``q_inf = 1``.
    """
    zero, one = Dyadic(0), Dyadic(1)
    ranked = []  # placements sorted by rank
    out = []
    for k, dk in enumerate(_as_positioning(eta, n), start=1):
        left = ranked[dk - 2] if dk >= 2 else zero
        right = ranked[dk - 1] if dk - 1 < len(ranked) else one
        q = left.midpoint(right)
        ranked.insert(dk - 1, q)
        out.append(q)
    return out


def q_of(eta, n):
    """The single placement ``q_n``."""
    if n < 1:
        raise ValueError("q is indexed from 1")
    return q_sequence(eta, n)[-1]


def positioning_from_ranks(r):
    """The positioning ``d_n = #{j <= n : r_j <= r_n}`` of distinct values ``r``."""
    seen = []
    d = []
    for v in r:
        k = bisect.bisect_left(seen, v)
        if k < len(seen) and seen[k] == v:
            raise ValueError(f"repeated value {v}")
        seen.insert(k, v)
        d.append(k + 1)
    return Positioning.explicit(d)


def is_compatible(r, eta):
    """Whether ``r_i < r_j`` exactly when ``pi_n(i) < pi_n(j)`` for all prefixes."""
    r = list(r)
    try:
        got = positioning_from_ranks(r).prefix(len(r))
    except ValueError:
        return False
    return got == _as_positioning(eta, len(r))


# -- greedy orderings ---------------------------------------------------------

@dataclass(frozen=True)
class GreedyOrdering:
    """Support positions listed by non-increasing modulus, ties by position."""

    rho: tuple

    def __len__(self):
        return len(self.rho)


def greedy_ordering(x):
    mods = np.abs(x.coefs)
    # positions are already sorted, so a stable sort on -|a| breaks ties by position
    idx = np.argsort(-mods, kind="stable")
    return GreedyOrdering(tuple(x.positions[i] for i in idx))


def greedy_sum(x, n):
    """Restriction of ``x`` to its ``n``-th greedy set."""
    n = int(n)
    if not 0 <= n <= len(x):
        raise ValueError(f"n must lie in 0..{len(x)}")
    return x.coordinate_projection(greedy_ordering(x).rho[:n])


def greedy_positioning(x):
    """``d_n`` = rank of ``rho(n)`` inside the greedy set ``A_n``."""
    return positioning_from_ranks(greedy_ordering(x).rho)


def greedy_j(x, n):
    """``sum_{j<=n} a_{rho(j)} e_{pi_n(j)}`` for the greedy positioning of ``x``."""
    n = int(n)
    if not 0 <= n <= len(x):
        raise ValueError(f"n must lie in 0..{len(x)}")
    rho = greedy_ordering(x).rho
    eta = greedy_positioning(x)
    pi = pi_prefix(eta, n).forward
    lookup = dict(x.items())
    return SparseVector((pi[j], lookup[rho[j]]) for j in range(n))
