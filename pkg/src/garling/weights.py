"""Admissible weight families and their prefix sums.

A weight is a positive non-increasing sequence with ``w_1 = 1`` that tends to
zero and has a divergent sum.  Neither of the last two properties is checkable
on a finite prefix, so weights are analytic families whose tails are known in
closed form:

* ``power``   -- ``w_j = j**-alpha`` with ``0 < alpha <= 1``;
* ``custom``  -- an explicit prefix followed by ``w_L * (L / j)**alpha``;
* ``explicit`` -- the same shape, written as a value list plus a declared
  tail rule (``{"rule": "power", "alpha": a}``).
"""

import json
import math
import threading

import numpy as np

from .kernels import compensated_cumsum

__all__ = ["Weight", "harmonic"]

# arrays beyond this many entries are not cached; range sums switch to
# integral bounds instead
CACHE_LIMIT = 1 << 23


class Weight:
    """A certified weight family with memoised values and prefix sums.

    Instances are immutable from the outside.  The value and prefix-sum caches
    grow by doubling under a lock; readers always receive read-only arrays.
    """

    def __init__(self, kind="power", alpha=1.0, prefix=None):
        alpha = float(alpha)
        if not 0.0 < alpha <= 1.0:
            raise ValueError(f"tail exponent must lie in (0, 1], got {alpha}")
        if kind not in ("power", "custom", "explicit"):
            raise ValueError(f"unknown weight kind {kind!r}")
        if kind == "power":
            prefix = (1.0,)
        else:
            if prefix is None or len(prefix) == 0:
                raise ValueError(f"{kind} weight needs a non-empty prefix")
            prefix = tuple(float(v) for v in prefix)
            if prefix[0] != 1.0:
                raise ValueError("the first weight must equal 1")
            for a, b in zip(prefix, prefix[1:]):
                if not b > 0.0:
                    raise ValueError("weights must be positive")
                if b > a:
                    raise ValueError("weights must be non-increasing")
            if any(not math.isfinite(v) for v in prefix):
                raise ValueError("weights must be finite")
        self.kind = kind
        self.alpha = alpha
        self.prefix = prefix
        self._lock = threading.Lock()
        self._values = np.empty(0)
        self._sums = np.zeros(1)  # _sums[N] = W(N)
        self._carry = (0.0, 0.0)

    # -- closed form --------------------------------------------------------

    def _formula(self, j):
        """Weights at the integer array ``j`` (1-based), same path as the cache."""
        j = np.asarray(j, dtype=np.float64)
        if self.kind == "power":
            if self.alpha == 1.0:
                return 1.0 / j
            return j ** -self.alpha
        L = len(self.prefix)
        out = np.empty(j.shape)
        head = j <= L
        out[head] = np.asarray(self.prefix)[j[head].astype(np.int64) - 1]
        tail = ~head
        if self.alpha == 1.0:
            out[tail] = self.prefix[-1] * (L / j[tail])
        else:
            out[tail] = self.prefix[-1] * (L / j[tail]) ** self.alpha
        return out

    def _antiderivative(self, x):
        """Primitive of the tail envelope, valid for ``x >= len(prefix)``."""
        L = len(self.prefix)
        c = self.prefix[-1] * L ** self.alpha
        if self.alpha == 1.0:
            return c * math.log(x)
        return c * x ** (1.0 - self.alpha) / (1.0 - self.alpha)

    # -- caches -------------------------------------------------------------

    def _grow(self, n):
        with self._lock:
            have = self._values.shape[0]
            if have >= n:
                return
            size = max(n, 2 * have, 64)
            if size > CACHE_LIMIT:
                if n > CACHE_LIMIT:
                    raise ValueError(f"{n} weights exceed the cache limit {CACHE_LIMIT}")
                size = CACHE_LIMIT
            fresh = self._formula(np.arange(have + 1, size + 1))
            sums, s, c = compensated_cumsum(fresh, *self._carry)
            values = np.concatenate([self._values, fresh])
            all_sums = np.concatenate([self._sums, sums])
            values.flags.writeable = False
            all_sums.flags.writeable = False
            # publish sums last; readers check values length first
            self._carry = (s, c)
            self._sums = all_sums
            self._values = values

    def values(self, n):
        """Read-only array ``(w_1, ..., w_n)``."""
        n = int(n)
        if n < 0:
            raise ValueError("n must be non-negative")
        if self._values.shape[0] < n:
            self._grow(n)
        return self._values[:n]

    def prefix_sums(self, n):
        """Read-only array ``(W(0), W(1), ..., W(n))``."""
        n = int(n)
        if n < 0:
            raise ValueError("n must be non-negative")
        if self._values.shape[0] < n:
            self._grow(n)
        return self._sums[:n + 1]

    # -- scalar access ------------------------------------------------------

    def weight_at(self, j):
        """The weight ``w_j`` for ``j >= 1``."""
        j = int(j)
        if j < 1:
            raise ValueError("weights are indexed from 1")
        if j <= CACHE_LIMIT:
            return float(self.values(j)[j - 1])
        return float(self._formula(np.array([j]))[0])

    def prefix_sum(self, n):
        """``W(n) = w_1 + ... + w_n`` with compensated summation; ``W(0) = 0``."""
        n = int(n)
        if n < 0:
            raise ValueError("n must be non-negative")
        return float(self.prefix_sums(n)[n])

    def range_sum_bounds(self, a, b):
        """Bounds ``(lo, hi)`` on ``w_a + ... + w_b`` (empty range gives zeros).

        Exact up to rounding while ``b`` is within the cache; beyond it the
        tail is bracketed by integrals of the non-increasing envelope.
        """
        a, b = max(int(a), 1), int(b)
        if b < a:
            return 0.0, 0.0
        if b <= CACHE_LIMIT:
            sums = self.prefix_sums(b)
            v = float(sums[b] - sums[a - 1])
            slack = 4e-16 * float(sums[b])
            return max(v - slack, 0.0), v + slack
        lo = hi = 0.0
        L = len(self.prefix)
        start = a
        if a <= CACHE_LIMIT:
            head = self.prefix_sum(CACHE_LIMIT) - self.prefix_sum(a - 1)
            lo, hi = head * (1 - 4e-16), head * (1 + 4e-16)
            start = CACHE_LIMIT + 1
        start = max(start, L + 1)
        # sum_{j=s}^{b} w_j lies between int_s^{b+1} w and w_s + int_s^{b} w
        lo += self._antiderivative(b + 1) - self._antiderivative(start)
        hi += self.weight_at(start) + self._antiderivative(b) - self._antiderivative(start)
        return lo * (1 - 1e-12), hi * (1 + 1e-12)

    # -- the telescoping identity ------------------------------------------

    def weight_identity_partial(self, n, i):
        """Partial sum ``sum_{k<=i} (w_k - w_{k+n})`` and its remainder.

        Returns ``(partial, remainder)`` where ``remainder`` is
        ``w_{i+1} + ... + w_{i+n}``; the two add up to ``W(n)``.
        """
        n, i = int(n), int(i)
        if n < 0 or i < 0:
            raise ValueError("n and i must be non-negative")
        w = self.values(n + i)
        partial = math.fsum(np.concatenate([w[:i], -w[n:n + i]]))
        remainder = math.fsum(w[i:i + n])
        return partial, remainder

    # -- documents ----------------------------------------------------------

    def to_doc(self):
        if self.kind == "power":
            return {"kind": "power", "alpha": self.alpha}
        if self.kind == "custom":
            return {"kind": "custom", "prefix": list(self.prefix), "tail_alpha": self.alpha}
        return {"kind": "explicit", "values": list(self.prefix),
                "tail": {"rule": "power", "alpha": self.alpha}}

    @classmethod
    def from_doc(cls, doc):
        if not isinstance(doc, dict) or "kind" not in doc:
            raise ValueError("weight document needs a 'kind' field")
        kind = doc["kind"]
        if kind == "power":
            return cls("power", doc.get("alpha", 1.0))
        if kind == "custom":
            return cls("custom", doc.get("tail_alpha", 1.0), doc.get("prefix"))
        if kind == "explicit":
            tail = doc.get("tail", {"rule": "power", "alpha": 1.0})
            if tail.get("rule") != "power":
                raise ValueError(f"unsupported tail rule {tail.get('rule')!r}")
            return cls("explicit", tail.get("alpha", 1.0), doc.get("values"))
        raise ValueError(f"unknown weight kind {kind!r}")

    @classmethod
    def parse(cls, text):
        """Parse ``"power:1"``, ``"power:0.5"`` or an inline JSON document."""
        text = text.strip()
        if text.startswith("{"):
            return cls.from_doc(json.loads(text))
        kind, _, arg = text.partition(":")
        if kind == "power":
            return cls("power", float(arg) if arg else 1.0)
        raise ValueError(f"cannot parse weight spec {text!r}")

    def spec(self):
        """Compact text form used in output headers."""
        if self.kind == "power":
            return f"power:{self.alpha:g}"
        return json.dumps(self.to_doc(), sort_keys=True, separators=(",", ":"))

    def __eq__(self, other):
        if not isinstance(other, Weight):
            return NotImplemented
        return (self.kind, self.alpha, self.prefix) == (other.kind, other.alpha, other.prefix)

    def __hash__(self):
        return hash((self.kind, self.alpha, self.prefix))

    def __repr__(self):
        return f"Weight({self.spec()})"


def harmonic():
    """The weight ``w_j = 1/j``."""
    return Weight("power", 1.0)
