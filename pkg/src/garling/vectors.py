"""Finitely supported vectors indexed by dyadic rationals."""

import math

import numpy as np

from .dyadic import Dyadic

__all__ = ["SparseVector", "disjoint_concat"]


class SparseVector:
    """Immutable finite map ``position -> nonzero real coefficient``.

    Positions are kept sorted, so ``coefs`` lists the coefficients in
    increasing position order; this is the order every norm routine needs.
    Zero coefficients are dropped on construction.
    """

    __slots__ = ("_pos", "_coefs")

    def __init__(self, entries=()):
        if isinstance(entries, dict):
            entries = entries.items()
        pairs = []
        for pos, coef in entries:
            c = float(coef)
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient {coef!r} at {pos}")
            pairs.append((Dyadic.parse(pos), c))
        pairs.sort(key=lambda pc: pc[0])
        for (a, _), (b, _) in zip(pairs, pairs[1:]):
            if a == b:
                raise ValueError(f"duplicate position {a}")
        pairs = [(q, c) for q, c in pairs if c != 0.0]
        self._pos = tuple(q for q, _ in pairs)
        coefs = np.array([c for _, c in pairs], dtype=np.float64)
        coefs.flags.writeable = False
        self._coefs = coefs

    @classmethod
    def _trusted(cls, positions, coefs):
        # positions already sorted, distinct and paired with nonzero coefs
        out = cls.__new__(cls)
        out._pos = tuple(positions)
        arr = np.array(coefs, dtype=np.float64)
        arr.flags.writeable = False
        out._coefs = arr
        return out

    @classmethod
    def from_coefficients(cls, coefs, start=1):
        """Entries ``coefs[i]`` at the integer positions ``start + i``."""
        return cls((start + i, c) for i, c in enumerate(coefs))

    @classmethod
    def unit(cls, pos, coef=1.0):
        return cls([(pos, coef)])

    # -- basic access -------------------------------------------------------

    @property
    def positions(self):
        return self._pos

    @property
    def coefs(self):
        return self._coefs

    def support(self):
        return frozenset(self._pos)

    def items(self):
        return zip(self._pos, self._coefs.tolist())

    def __len__(self):
        return len(self._pos)

    def __bool__(self):
        return bool(self._pos)

    def __getitem__(self, pos):
        q = Dyadic.parse(pos)
        for p, c in self.items():
            if p == q:
                return c
        return 0.0

    def __iter__(self):
        # without this, indexing by 0, 1, 2, ... would never stop
        raise TypeError("SparseVector is not iterable; use items(), positions or coefs")

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self._pos == other._pos and np.array_equal(self._coefs, other._coefs)

    def __hash__(self):
        return hash((self._pos, self._coefs.tobytes()))

    def __repr__(self):
        body = ", ".join(f"{p}: {c!r}" for p, c in self.items())
        return f"SparseVector({{{body}}})"

    def first(self):
        return self._pos[0] if self._pos else None

    def last(self):
        return self._pos[-1] if self._pos else None

    def precedes(self, other):
        """True when every position of ``self`` is below every position of ``other``."""
        if not self or not other:
            return True
        return self._pos[-1] < other._pos[0]

    # -- transformations ----------------------------------------------------

    def scale(self, factor):
        factor = float(factor)
        if factor == 0.0:
            return SparseVector()
        return SparseVector._trusted(self._pos, self._coefs * factor)

    def translate(self, offset):
        """Move every entry by the dyadic amount ``offset``."""
        d = Dyadic.parse(offset)
        return SparseVector._trusted([p + d for p in self._pos], self._coefs)

    def shift(self, phi):
        """Reposition entries along a strictly increasing map ``phi``.

        ``phi`` is a mapping or a callable defined on the support.
        """
        get = phi.__getitem__ if hasattr(phi, "__getitem__") else phi
        new = [Dyadic.parse(get(p)) for p in self._pos]
        for a, b in zip(new, new[1:]):
            if not a < b:
                raise ValueError("shift map must be strictly increasing on the support")
        return SparseVector._trusted(new, self._coefs)

    def coordinate_projection(self, positions):
        """Keep only the entries whose positions lie in ``positions``."""
        keep = {Dyadic.parse(q) for q in positions}
        idx = [i for i, p in enumerate(self._pos) if p in keep]
        return SparseVector._trusted([self._pos[i] for i in idx], self._coefs[idx])

    def restrict(self, predicate):
        idx = [i for i, p in enumerate(self._pos) if predicate(p)]
        return SparseVector._trusted([self._pos[i] for i in idx], self._coefs[idx])

    def abs(self):
        return SparseVector._trusted(self._pos, np.abs(self._coefs))

    def __add__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        merged = dict(self.items())
        for p, c in other.items():
            merged[p] = merged.get(p, 0.0) + c
        return SparseVector(merged)

    def __sub__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self + other.scale(-1.0)

    # -- documents ----------------------------------------------------------

    def to_doc(self):
        return {"entries": [{"pos": str(p), "coef": c} for p, c in self.items()]}

    @classmethod
    def from_doc(cls, doc):
        if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
            raise ValueError("vector document needs an 'entries' list")
        pairs = []
        for k, entry in enumerate(doc["entries"]):
            if not isinstance(entry, dict) or "pos" not in entry or "coef" not in entry:
                raise ValueError(f"entries[{k}] needs 'pos' and 'coef'")
            pos = entry["pos"]
            if isinstance(pos, float):
                raise ValueError(f"entries[{k}].pos must be an integer or a fraction string")
            try:
                pairs.append((Dyadic.parse(pos), float(entry["coef"])))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"entries[{k}]: {exc}") from None
        return cls(pairs)


def disjoint_concat(blocks, offsets=None):
    """Union of ``blocks[k]`` translated by ``offsets[k]``; overlaps are rejected."""
    blocks = list(blocks)
    if offsets is None:
        offsets = [0] * len(blocks)
    offsets = list(offsets)
    if len(offsets) != len(blocks):
        raise ValueError("need one offset per block")
    moved = [b.translate(o) for b, o in zip(blocks, offsets)]
    pairs = [pc for b in moved for pc in b.items()]
    seen = set()
    for p, _ in pairs:
        if p in seen:
            raise ValueError(f"blocks overlap at position {p}")
        seen.add(p)
    moved = [b for b in moved if b]
    if all(a.precedes(b) for a, b in zip(moved, moved[1:])):
        pos = [p for b in moved for p in b.positions]
        coefs = np.concatenate([b.coefs for b in moved]) if moved else np.empty(0)
        return SparseVector._trusted(pos, coefs)
    return SparseVector(pairs)
