"""Shared hypothesis strategies."""

from fractions import Fraction

from hypothesis import strategies as st

from garling import Dyadic, SparseVector

dyadics = st.builds(Dyadic, st.integers(-(1 << 40), 1 << 40), st.integers(0, 40))
small_dyadics = st.builds(Dyadic, st.integers(-64, 64), st.integers(0, 5))
coefs = st.floats(-10, 10, allow_nan=False).filter(lambda v: abs(v) > 1e-6)
exponents = st.sampled_from([0.5, 1.0, 2.0])


@st.composite
def vectors(draw, max_size=10, positions=small_dyadics, nonneg=False):
    pos = draw(st.lists(positions, unique=True, max_size=max_size))
    cs = st.floats(1e-3, 10) if nonneg else coefs
    vals = draw(st.lists(cs, min_size=len(pos), max_size=len(pos)))
    return SparseVector(zip(pos, vals))


@st.composite
def increasing_maps(draw, x):
    """A strictly increasing map on supp(x), as a dict."""
    gaps = draw(st.lists(st.builds(Fraction, st.integers(1, 50), st.sampled_from([1, 2, 4, 8])),
                         min_size=len(x), max_size=len(x)))
    start = draw(st.integers(-100, 100))
    out, cur = {}, Fraction(start)
    for q, g in zip(x.positions, gaps):
        cur += g
        out[q] = Dyadic.parse(cur)
    return out
