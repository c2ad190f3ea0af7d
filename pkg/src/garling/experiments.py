"""Desk-scale runs of the quantitative constructions built on block averages.

Every "for n large enough" step becomes a bounded search with an explicit cap;
exhausting a cap raises :class:`SearchExhausted` carrying the best partial
result instead of silently returning something weaker.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .dyadic import Dyadic
from .kernels import garling_dp
from .norms import NormValue, garling_norm, garling_power
from .parallel import pmap
from .positioning import placement_order, q_sequence
from .seeds import EXACT_LIMIT, Seed, lorentz_tiled_upper, tiled_garling
from .vectors import SparseVector, disjoint_concat
from .weights import harmonic

__all__ = [
    "GUARD",
    "AverageFamily",
    "ConvergenceTable",
    "steve1_limit",
    "steve2_limit",
    "steve1_run",
    "steve2_run",
    "NonSymWitness",
    "SearchExhausted",
    "nonsym_search",
    "LinfReport",
    "linf_witness",
    "TupleChoice",
    "TreeState",
    "tree_build",
    "tree_separation_check",
    "branch_report",
    "domination_check",
]

# margin for strict inequalities decided in floating point
GUARD = 1e-9


class SearchExhausted(RuntimeError):
    """A bounded search ran out of candidates; ``partial`` holds the best attempt."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


def _geometric_candidates(start, cap):
    c = start
    while c <= cap:
        yield c
        c *= 2


# -- block averages -------------------------------------------------------------

class AverageFamily:
    """``z_n = Phi(n)**-1 * (sum of the first n blocks generated by a seed)``.

    Blocks sit in consecutive unit windows ``(k-1, k)``, so ``z_n`` lives in
    ``(0, n)`` before the optional translation ``offset(n)``.
    """

    def __init__(self, seed=None, w=None, p=1.0, offset=None):
        self.seed = seed if seed is not None else Seed.unit()
        if not self.seed.finite:
            raise ValueError("block averages need a finitely supported seed")
        if not self.seed.proper:
            raise ValueError("block averages need a proper seed")
        self.w = harmonic() if w is None else w
        self.p = float(p)
        self.offset = offset
        L = self.seed.length

        order = placement_order(self.seed.eta, L)
        q = q_sequence(self.seed.eta, L)
        a = self.seed.coefficients(L)
        pairs = [(q[j - 1], a[j - 1]) for j in order if a[j - 1] != 0.0]
        self._q = [pq for pq, _ in pairs]
        self._a = np.array([c for _, c in pairs])
        self._phi = {}

    @property
    def block_size(self):
        return self._a.shape[0]

    def phi(self, n):
        if n not in self._phi:
            value = tiled_garling(self._a, n, self.w, self.p)
            if not value.is_exact():
                raise ValueError(f"Phi({n}) is not exactly computable at this size")
            self._phi[n] = value.upper
        return self._phi[n]

    def ordered(self, n):
        """Coefficients of ``z_n`` in position order."""
        return np.tile(self._a, n) / self.phi(n)

    def vector(self, n, offset=None):
        if offset is None:
            offset = self.offset(n) if callable(self.offset) else (self.offset or 0)
        base = Dyadic.parse(offset)
        pos = [base + k + q for k in range(n) for q in self._q]
        return SparseVector._trusted(pos, self.ordered(n))


# -- convergence of averages next to a fixed vector ------------------------------

@dataclass
class ConvergenceTable:
    rows: list
    limit: float
    bound: str
    bound_ok: bool

    @property
    def final(self):
        return self.rows[-1][1] if self.rows else None

    @property
    def final_gap(self):
        return abs(self.final - self.limit) if self.rows else None


def steve1_limit(x, w, p):
    return max(1.0, garling_norm(x, w, p).value)


def steve2_limit(x, w, p):
    return (1.0 + garling_norm(x, w, p).value ** p) ** (1.0 / p)


def _unit_check(z, w, p, n):
    norm = garling_norm(z, w, p).value
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"z_{n} has norm {norm}, expected 1")


def steve1_run(x, n_values, w, p, family=None, threads=None):
    """Table of ``||z_n + (x translated by n)||`` against ``max(1, ||x||)``.

    The default family is the unit-seed average translated to ``(-n, 0)``.
    """
    if x and x.first() < 0:
        raise ValueError("x must be supported in [0, inf)")
    family = family or AverageFamily(Seed.unit(), w, p, offset=lambda n: -n)
    limit = steve1_limit(x, w, p)

    def row(n):
        z = family.vector(n)
        _unit_check(z, w, p, n)
        if z and not z.last() < n:
            raise ValueError(f"z_{n} must be supported in (-inf, {n})")
        return n, garling_norm(disjoint_concat([z, x], [0, n]), w, p).value

    rows = pmap(row, [int(n) for n in n_values], threads)
    ok = all(v >= limit - GUARD for _, v in rows)
    return ConvergenceTable(rows, limit, "lower", ok)


def steve2_run(x, n_values, w, p, family=None, m=None, threads=None):
    """Table of ``||x + (z_n translated by m)||`` against ``(1 + ||x||**p)**(1/p)``.

    ``m`` defaults to the smallest integer bounding the support of ``x``.
    """
    if m is None:
        m = max(0, x.last().ceil()) if x else 0
    elif x and x.last() > m:
        raise ValueError(f"x must be supported in (-inf, {m}]")
    family = family or AverageFamily(Seed.unit(), w, p, offset=0)
    limit = steve2_limit(x, w, p)

    def row(n):
        z = family.vector(n)
        _unit_check(z, w, p, n)
        if z and z.first() < 0:
            raise ValueError(f"z_{n} must be supported in [0, inf)")
        return n, garling_norm(disjoint_concat([x, z], [0, m]), w, p).value

    rows = pmap(row, [int(n) for n in n_values], threads)
    ok = all(v <= limit + GUARD for _, v in rows)
    return ConvergenceTable(rows, limit, "upper", ok)


# -- non-symmetry witness ---------------------------------------------------------

@dataclass
class NonSymWitness:
    eps: float
    k: int
    n: tuple
    forward_norm_p: float
    reverse_norm: float
    log: list = field(default_factory=list)

    def satisfied(self):
        return (self.forward_norm_p > self.k - self.eps
                and self.reverse_norm < 1.0 + self.eps)


def _forward_reverse(family, ns, w, p):
    blocks = [family.ordered(n) for n in ns]
    fwd = garling_power(np.concatenate(blocks), w, p)
    rev = garling_power(np.concatenate(blocks[::-1]), w, p) ** (1.0 / p)
    return fwd, rev


def nonsym_search(seed=None, eps=0.5, k=2, w=None, p=1.0, n_cap=4096):
    """Grow ``n_1 < ... < n_k`` so that the averages ``z_{n_j}`` separate orders.

    Placed left to right in increasing ``n`` the tuple has p-power norm above
    ``k - eps``; placed in decreasing ``n`` its norm stays below ``1 + eps``.
    Step ``j`` accepts the first candidate (``n_{j-1} + 1`` then doubling up
    to ``n_cap``) with p-power gain reaching ``j - j eps / k`` and reverse
    norm below ``1 + eps``.
    """
    family = AverageFamily(seed, w, p)
    w = family.w
    chosen = []
    log = []
    fwd = rev = 1.0
    for j in range(1, k + 1):
        need_fwd = j - j * eps / k
        best = None
        accepted = False
        start = chosen[-1] + 1 if chosen else 1
        for c in _geometric_candidates(start, n_cap):
            f, r = _forward_reverse(family, chosen + [c], w, p)
            margin = min(f - need_fwd, 1.0 + eps - r)
            log.append({"step": j, "n": c, "forward_norm_p": f, "reverse_norm": r})
            if best is None or margin > best[0]:
                best = (margin, c, f, r)
            if f > need_fwd + GUARD and r < 1.0 + eps - GUARD:
                chosen.append(c)
                fwd, rev = f, r
                accepted = True
                break
        if not accepted:
            _, c, f, r = best if best else (None, None, float("nan"), float("nan"))
            partial = NonSymWitness(eps, k, tuple(chosen + ([c] if c else [])), f, r, log)
            raise SearchExhausted(
                f"step {j}: no n <= {n_cap} reaches forward^p > {need_fwd:.6g} "
                f"with reverse < {1 + eps:.6g} (best forward^p {f:.6g}, reverse {r:.6g})",
                partial,
            )
    return NonSymWitness(eps, k, tuple(chosen), fwd, rev, log)


# -- l_infinity witness -----------------------------------------------------------

@dataclass
class LinfReport:
    eps: float
    k: int
    n: tuple
    vectors: list
    checks: int
    min_ratio: float
    max_ratio: float
    violations: list

    @property
    def passed(self):
        return not self.violations


def _window(size, j):
    """``size`` increasing dyadics strictly inside ``(2**-j, 2**(1-j))``."""
    r = size.bit_length()
    return [Dyadic((1 << r) + i, r + j) for i in range(1, size + 1)]


def linf_witness(seed=None, eps=0.25, k=4, w=None, p=1.0, samples=1000, rng_seed=0,
                 n_cap=4096, threads=None):
    """Check ``max a <= ||sum a_j z''_j|| <= (1 + eps) max a`` on sampled ``a >= 0``.

    ``z''_j`` is the average ``z_{n_j}`` moved into ``(2**-j, 2**(1-j))``, so the
    tuple is placed in decreasing ``n``.  Indices grow by the same candidate
    rule as :func:`nonsym_search`, keeping the reverse norm below ``1 + eps``.
    The first ``k + 1`` coefficient vectors are the unit vectors and the
    all-ones vector; the rest are uniform on ``[0, 1]**k``.
    """
    family = AverageFamily(seed, w, p)
    w = family.w
    chosen = [1]
    for j in range(2, k + 1):
        for c in _geometric_candidates(chosen[-1] + 1, n_cap):
            tail = [family.ordered(n) for n in [c] + chosen[::-1]]
            r = garling_power(np.concatenate(tail), w, p) ** (1.0 / p)
            if r < 1.0 + eps - GUARD:
                chosen.append(c)
                break
        else:
            raise SearchExhausted(f"no n <= {n_cap} keeps the reverse norm below {1 + eps}",
                                  tuple(chosen))
    blocks = [family.ordered(n) for n in chosen]
    vectors = [SparseVector._trusted(_window(b.shape[0], j), b)
               for j, b in enumerate(blocks, start=1)]

    rng = np.random.default_rng(rng_seed)
    coef_rows = [np.eye(k)[i] for i in range(k)] + [np.ones(k)]
    while len(coef_rows) < samples:
        coef_rows.append(rng.random(k))
    coef_rows = coef_rows[:max(samples, 0)]

    def evaluate(a):
        # z''_k is leftmost, z''_1 rightmost
        coefs = np.concatenate([a[j] * blocks[j] for j in range(k - 1, -1, -1)])
        return garling_power(coefs, w, p) ** (1.0 / p)

    norms = pmap(evaluate, coef_rows, threads)
    violations = []
    ratios = []
    for a, nv in zip(coef_rows, norms):
        top = float(a.max())
        if top == 0.0:
            continue
        ratios.append(nv / top)
        if nv < top * (1 - 1e-12) or nv > (1.0 + eps) * top * (1 + 1e-12):
            violations.append((a.tolist(), nv))
    return LinfReport(eps, k, tuple(chosen), vectors, len(coef_rows),
                      min(ratios) if ratios else 1.0, max(ratios) if ratios else 1.0, violations)


# -- the binary tree of seeds -----------------------------------------------------

@dataclass
class TupleChoice:
    """The disjoint tuple ``y_1, ..., y_m`` used by the nodes of one level."""

    level: int
    count: int
    n: tuple
    growth: float
    reverse_raw: float
    forward_ratio: float
    forward_ok: bool


@dataclass
class TreeState:
    depth: int
    p: float
    eps: list
    m: list
    n: list
    A: list
    B: list
    tuples: list
    nodes: dict
    node_norms: dict
    windows: list
    branches: tuple = ()
    w: object = None
    exact_limit: int = EXACT_LIMIT
    diagnostics: list = field(default_factory=list)
    _phi_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def node(self, tau):
        """Coefficient array of ``u_tau`` on its window (zero for nodes ending in 0)."""
        return self.nodes.get(tau)

    def vector(self, bits):
        """``f_tau = sum_{sigma <= tau} u_sigma`` as (positions, coefficients)."""
        pos, coefs = [np.array([1], dtype=np.int64)], [np.array([1.0])]
        for k in range(1, len(bits) + 1):
            node = self.nodes.get(bits[:k])
            if node is not None:
                pos.append(node[0])
                coefs.append(node[1])
        return np.concatenate(pos), np.concatenate(coefs)

    def sparse(self, bits):
        pos, coefs = self.vector(bits)
        return SparseVector._trusted([Dyadic(int(q)) for q in pos], coefs)

    def components(self, bits):
        """Disjoint pieces of ``f_tau``: ``e_1`` and each nonzero node."""
        out = [np.array([1.0])]
        for k in range(1, len(bits) + 1):
            node = self.nodes.get(bits[:k])
            if node is not None:
                out.append(node[1])
        return out

    def phi(self, bits, m):
        # f_tau only depends on which levels carry a 1
        key = (bits.rstrip("0"), int(m))
        if key not in self._phi_cache:
            self._phi_cache[key] = _phi_bounds(self.components(bits), m, self.w, self.p,
                                               self.exact_limit)
        return self._phi_cache[key]


def _phi_bounds(components, m, w, p, exact_limit):
    """Enclosure of ``Phi[f](m)`` for ``f`` given as consecutive disjoint pieces."""
    whole = np.concatenate(components)
    core = tiled_garling(whole, m, w, p, exact_limit)
    if core.is_exact():
        return core
    # p-convexity over the disjoint pieces
    split = sum(tiled_garling(c, m, w, p, exact_limit).upper ** p for c in components)
    upper = min(core.upper, split ** (1.0 / p))
    return NormValue(core.lower, max(upper, core.lower))


def _cheap_upper(vals, m, w, exact_limit):
    """Upper bound on the p-power of ``m`` tiles of ``vals`` (already ``|a|**p``)."""
    if vals.shape[0] * m <= exact_limit:
        return garling_dp(np.tile(vals, m), w.values(vals.shape[0] * m))
    return lorentz_tiled_upper(vals, m, w)


def _phi_at_most(components, m, w, p, threshold, exact_limit):
    """Certified ``Phi[f](m) <= threshold``.

    The interval enclosure of :func:`tiled_garling` has the same upper end as
    the Lorentz bound once the tiles outgrow ``exact_limit``, so only the
    cheap bounds are consulted: the whole tiled Lorentz sum, the exact tiled
    norm when small, and p-convexity over the disjoint pieces.
    """
    parts = [np.abs(c) ** p for c in components]
    parts = [v[v != 0.0] for v in parts]
    parts = [v for v in parts if v.shape[0]]
    vals = np.concatenate(parts)
    target = threshold ** p
    lo, _ = w.range_sum_bounds(1, m)
    if float(vals.max()) * lo > target:
        return False
    if lorentz_tiled_upper(vals, m, w) <= target:
        return True
    if vals.shape[0] * m <= exact_limit:
        return garling_dp(np.tile(vals, m), w.values(vals.shape[0] * m)) <= target
    return math.fsum(_cheap_upper(v, m, w, exact_limit) for v in parts) <= target


def _choose_tuple(family, count, w, p, support_cap, growths):
    """Pick ``n_1 <= ... <= n_count`` maximising forward / reverse under a support cap."""
    L = family.block_size
    cap = max(support_cap, count * L)
    best = None
    for g in growths:
        ns, used = [], 0
        for i in range(count):
            v = max(1, int(math.floor(g ** i)))
            ns.append(max(v, ns[-1]) if ns else v)
            used += ns[-1] * L
            if used > cap:
                break
        if used > cap:
            continue
        blocks = [family.ordered(n) for n in ns]
        fwd = garling_power(np.concatenate(blocks), w, p) ** (1.0 / p)
        rev = garling_power(np.concatenate(blocks[::-1]), w, p) ** (1.0 / p)
        ratio = fwd / rev
        if best is None or ratio > best[0] * (1 + 1e-12):
            best = (ratio, g, tuple(ns), rev, blocks)
    return best


# growth factors tried for the indices of a level's tuple, n_i = floor(g**(i-1))
DEFAULT_GROWTHS = tuple(round(1.0 + 0.05 * i, 2) for i in range(21)) + (3.0, 4.0)


def tree_build(K=3, base=None, p=1.0, w=None, eps0=1.0, m0=1, branches=(), support_cap=2304,
               m_cap=1 << 16, exact_limit=EXACT_LIMIT, growths=DEFAULT_GROWTHS):
    """Realise the first ``K`` levels of the binary tree of vectors ``u_tau``.

    Level ``k + 1`` nodes ending in 1 carry ``2**-(k+1) eps_k sum_i y_i`` where
    ``y_1, ..., y_{m_k}`` are normalised block averages placed in decreasing
    order (``||sum y_i|| = 1``) right after position ``n_k``; nodes ending in 0
    vanish.  ``u_{empty} = e_1`` occupies position 1.  After each level,
    ``eps_{k+1} = min(eps_k, 2 (2**p - 1)**(1/p) m_k**(-1/p))`` and ``m_{k+1}``
    is the smallest ``m > m_k`` with a certified
    ``Phi[f_tau](m) <= 2**-(k+2) (k+1)**-1 eps_{k+1} m**(1/p)`` for every
    ``tau`` of length ``k + 1``.
    """
    for b in branches:
        if len(b) != K or set(b) - {"0", "1"}:
            raise ValueError(f"branch {b!r} is not a bit string of length {K}")
    p = float(p)
    family = AverageFamily(base, w, p)
    w = family.w
    eps = [float(eps0)]
    m = [int(m0)]
    n = [1]
    tuples = []
    nodes = {}
    node_norms = {"": 1.0}
    windows = [(1, 1)]
    diagnostics = []

    for k in range(K):
        count = m[k]
        choice = _choose_tuple(family, count, w, p, support_cap, growths)
        if choice is None:
            raise SearchExhausted(f"level {k + 1}: no tuple of {count} averages fits the support cap")
        ratio, g, ns, rev, blocks = choice
        scale = 2.0 ** -(k + 1) * eps[k] / rev
        coefs = np.concatenate([b * scale for b in blocks[::-1]])
        pos = np.arange(n[k] + 1, n[k] + 1 + coefs.shape[0], dtype=np.int64)
        tuples.append(TupleChoice(k + 1, count, ns, g, rev, ratio,
                                  2.0 * ratio >= count ** (1.0 / p) - GUARD))
        node_norm = garling_power(coefs, w, p) ** (1.0 / p)
        for bits in itertools.product("01", repeat=k + 1):
            tau = "".join(bits)
            if tau.endswith("1"):
                nodes[tau] = (pos, coefs)
                node_norms[tau] = node_norm
            else:
                node_norms[tau] = 0.0
        n.append(int(pos[-1]))
        windows.append((n[k] + 1, n[k + 1]))
        eps.append(min(eps[k], 2.0 * (2.0 ** p - 1.0) ** (1.0 / p) * m[k] ** (-1.0 / p)))

        if k + 1 < K:
            level = k + 1
            delta = 2.0 ** -(level + 1) / level * eps[level]
            taus = ["".join(b) for b in itertools.product("01", repeat=level)]
            # nodes ending in 0 vanish, so f_tau only depends on where the 1s are
            pieces = {}
            for tau in taus:
                comps = [np.array([1.0])] + [nodes[tau[:j]][1] for j in range(1, level + 1)
                                             if tau[:j] in nodes]
                pieces[tuple(len(c) for c in comps)] = comps
            mm = m[k] + 1
            while True:
                if mm > m_cap:
                    raise SearchExhausted(f"m_{level}: no m <= {m_cap} meets the fundamental bound")
                thr = delta * mm ** (1.0 / p)
                if all(_phi_at_most(c, mm, w, p, thr, exact_limit) for c in pieces.values()):
                    break
                mm += 1
            m.append(mm)
            diagnostics.append({"level": level, "m": mm, "delta": delta})

    A = [2.0 ** (-k - 1) * eps[k] * m[k] ** (1.0 / p) for k in range(K)]
    B = [math.inf if k == 0 else (k ** -p * A[k] ** p + 2.0 ** (-k * p)) ** (1.0 / p)
         for k in range(K)]
    return TreeState(K, p, eps, m, n, A, B, tuples, nodes, node_norms, windows, tuple(branches),
                     w=w, exact_limit=exact_limit, diagnostics=diagnostics)


def _tree_invariants(state):
    """Node-level invariants of a built tree as a list of (name, ok, detail)."""
    out = []
    p = state.p
    for k in range(len(state.eps) - 1):
        expect = min(state.eps[k], 2.0 * (2.0 ** p - 1.0) ** (1.0 / p) * state.m[k] ** (-1.0 / p))
        ok = abs(state.eps[k + 1] - expect) <= 1e-12 * max(1.0, expect)
        out.append((f"eps_{k + 1} recursion", ok, f"{state.eps[k + 1]!r} vs {expect!r}"))
    for tau, norm in sorted(state.node_norms.items(), key=lambda kv: (len(kv[0]), kv[0])):
        k = len(tau)
        if k == 0:
            continue
        bound = 2.0 ** -k * state.eps[k - 1]
        out.append((f"||u_{tau}|| <= 2^-{k} eps_{k - 1}", norm <= bound * (1 + 1e-12),
                    f"{norm:.12g} vs {bound:.12g}"))
        if tau.endswith("0"):
            out.append((f"u_{tau} = 0", tau not in state.nodes and norm == 0.0, ""))
        else:
            lo, hi = state.windows[k]
            pos = state.nodes[tau][0]
            ok = bool(pos[0] >= lo and pos[-1] <= hi and state.n[k - 1] < pos[0])
            out.append((f"supp(u_{tau}) in ({state.n[k - 1]}, {state.n[k]}]", ok, ""))
    return out


def _decide(lower, upper, op, target):
    """Three-valued comparison of an enclosure with a target."""
    if op == ">=":
        if lower >= target * (1 - 1e-12):
            return "pass"
        return "fail" if upper < target * (1 - 1e-12) else "undecided"
    if upper <= target * (1 + 1e-12):
        return "pass"
    return "fail" if lower > target * (1 + 1e-12) else "undecided"


def branch_report(state, bits):
    """Level table for one branch: ``Phi[h_b](m_k)`` against ``A_k`` or ``B_k``."""
    if len(bits) != state.depth or set(bits) - {"0", "1"}:
        raise ValueError(f"branch must be a bit string of length {state.depth}")
    p, w = state.p, state.w
    rows = []
    comps = state.components(bits)
    for k in range(state.depth):
        mk = state.m[k]
        phi = state.phi(bits, mk)
        lower = phi.lower
        if bits[k] == "1":
            # copy i contributes the projection onto y_i: the forward-ordered tuple
            lower = max(lower, 2.0 ** -(k + 1) * state.eps[k] * state.tuples[k].forward_ratio)
            status = _decide(lower, phi.upper, ">=", state.A[k])
            target, kind = state.A[k], "A"
        else:
            target, kind = state.B[k], "B"
            status = "pass" if math.isinf(target) else _decide(lower, phi.upper, "<=", target)
        rows.append({"level": k, "bit": bits[k], "m": mk, "phi_lower": lower,
                     "phi_upper": phi.upper, "bound": kind, "target": target, "status": status})
    # tail estimate behind B_k
    tails = []
    for k in range(state.depth):
        if bits[k] != "0":
            continue
        rest = [state.nodes[bits[:j]][1] for j in range(k + 2, state.depth + 1)
                if bits[:j] in state.nodes]
        gap = garling_power(np.concatenate(rest), w, p) if rest else 0.0
        bound = 2.0 ** (-k * p) / state.m[k]
        tails.append({"level": k, "gap_p": gap, "bound": bound, "ok": gap <= bound * (1 + 1e-12)})
    total = math.fsum(garling_power(c, w, p) for c in comps)
    budget = sum(2.0 ** (-k * p) for k in range(state.depth + 1))
    return {"branch": bits, "rows": rows, "tails": tails,
            "sum_norm_p": total, "sum_budget": budget, "sum_ok": total <= budget * (1 + 1e-12)}


def domination_check(state, small, large, n_values=(1, 2, 3, 4, 8, 16)):
    """``Phi[h_small](n) <= Phi[h_large](n)`` when the 1s of ``small`` are 1s of ``large``.

    A row is ``undecided`` when the two enclosures overlap.
    """
    if any(a == "1" and b == "0" for a, b in zip(small, large)):
        raise ValueError(f"{small} is not levelwise contained in {large}")
    ns = sorted(set(int(v) for v in n_values) | set(state.m))
    rows = []
    for n in ns:
        s = state.phi(small, n)
        big = state.phi(large, n)
        if s.upper <= big.lower * (1 + 1e-12):
            status = "pass"
        elif s.lower > big.upper * (1 + 1e-12):
            status = "fail"
        else:
            status = "undecided"
        rows.append({"n": n, "small": (s.lower, s.upper), "large": (big.lower, big.upper),
                     "status": status})
    return rows


def tree_separation_check(state, pair):
    """Per-level comparison of two branches plus their ``A_k / B_k`` ratios."""
    a, b = pair
    ra, rb = branch_report(state, a), branch_report(state, b)
    ratios = [state.A[k] / state.B[k] if k and state.B[k] else math.inf
              for k in range(state.depth)]
    levels = []
    for k in range(state.depth):
        levels.append({"level": k, "m": state.m[k], "A": state.A[k], "B": state.B[k],
                       "A_over_B": ratios[k], a: ra["rows"][k], b: rb["rows"][k]})
    return {"pair": (a, b), "same_vector": a == b, "levels": levels,
            "invariants": _tree_invariants(state)}
