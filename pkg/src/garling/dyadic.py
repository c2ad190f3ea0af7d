"""Exact dyadic rationals ``mantissa / 2**exponent`` used as vector positions."""

from fractions import Fraction
import functools
import re

__all__ = ["Dyadic", "as_dyadic"]

_FRACTION_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


@functools.total_ordering
class Dyadic:
    """Immutable dyadic rational in canonical form.

    The mantissa is odd unless the exponent is zero, so equal values always
    have equal ``(mantissa, exponent)`` pairs.
    """

    __slots__ = ("_m", "_e")

    def __init__(self, mantissa=0, exponent=0):
        m, e = int(mantissa), int(exponent)
        if e < 0:
            m <<= -e
            e = 0
        if m == 0:
            e = 0
        elif e:
            tz = (m & -m).bit_length() - 1
            if tz:
                k = min(tz, e)
                m >>= k
                e -= k
        self._m = m
        self._e = e

    # -- constructors -------------------------------------------------------

    @classmethod
    def parse(cls, value):
        """Build from an int, ``Fraction``, float, ``Dyadic`` or ``"p/q"`` string."""
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not positions")
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Fraction):
            return cls._from_ratio(value.numerator, value.denominator)
        if isinstance(value, float):
            if value != value or value in (float("inf"), float("-inf")):
                raise ValueError(f"non-finite position {value!r}")
            return cls._from_ratio(*value.as_integer_ratio())
        if isinstance(value, str):
            match = _FRACTION_RE.match(value)
            if not match:
                raise ValueError(f"cannot parse position {value!r}")
            num = int(match.group(1))
            den = int(match.group(2)) if match.group(2) is not None else 1
            return cls._from_ratio(num, den)
        raise TypeError(f"cannot interpret {type(value).__name__} as a dyadic position")

    @classmethod
    def _from_ratio(cls, num, den):
        if den <= 0:
            raise ValueError("denominator must be positive")
        g = Fraction(num, den)
        den = g.denominator
        if den & (den - 1):
            raise ValueError(f"{num}/{den} is not dyadic (denominator not a power of two)")
        return cls(g.numerator, den.bit_length() - 1)

    # -- accessors ----------------------------------------------------------

    @property
    def mantissa(self):
        return self._m

    @property
    def exponent(self):
        return self._e

    def to_fraction(self):
        return Fraction(self._m, 1 << self._e)

    def __float__(self):
        return self._m / (1 << self._e)

    def is_integer(self):
        return self._e == 0

    def floor(self):
        return self._m >> self._e

    def ceil(self):
        return -((-self._m) >> self._e)

    # -- arithmetic ---------------------------------------------------------

    def _aligned(self, other):
        e = max(self._e, other._e)
        return self._m << (e - self._e), other._m << (e - other._e), e

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, e = self._aligned(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, e = self._aligned(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Dyadic(-self._m, self._e)

    def halve(self):
        return Dyadic(self._m, self._e + 1)

    def midpoint(self, other):
        other = _coerce(other)
        a, b, e = self._aligned(other)
        return Dyadic(a + b, e + 1)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._m == other._m and self._e == other._e

    def __lt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a < b

    def __hash__(self):
        # agrees with hash() of the equal int / Fraction
        return hash(self._m) if self._e == 0 else hash(self.to_fraction())

    # -- text ---------------------------------------------------------------

    def __str__(self):
        if self._e == 0:
            return str(self._m)
        return f"{self._m}/{1 << self._e}"

    def __repr__(self):
        return f"Dyadic({self})"


def _coerce(value):
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Dyadic(value, 0)
    if isinstance(value, Fraction):
        try:
            return Dyadic.parse(value)
        except ValueError:
            return NotImplemented
    return NotImplemented


def as_dyadic(value):
    """Shorthand for :meth:`Dyadic.parse`."""
    return Dyadic.parse(value)
