"""Acceptance criteria, each pinned at its stated tolerance and budget.

Run ``pytest -m acceptance -s`` to see the per-criterion PASS/FAIL lines.
"""

import math
import time

import numpy as np
import pytest

from garling import (
    Dyadic,
    SparseVector,
    disjoint_concat,
    garling_norm,
    garling_norm_bruteforce,
    harmonic,
    lorentz_norm,
)
from garling.experiments import (
    SearchExhausted,
    _tree_invariants,
    branch_report,
    domination_check,
    linf_witness,
    nonsym_search,
    steve2_run,
    tree_build,
)
from garling.positioning import (
    Positioning,
    pi_prefixes,
    positioning_from_pi,
    positioning_from_ranks,
    q_sequence,
)
from garling.positioning import pi_prefix
from garling.seeds import Seed, e_tail

pytestmark = pytest.mark.acceptance

W = harmonic()
EXPONENTS = (0.5, 1.0, 2.0)


def _random_vector(rng, max_support, spread=64, denominator_bits=4):
    size = int(rng.integers(1, max_support + 1))
    numerators = rng.choice(spread << denominator_bits, size=size, replace=False)
    coefs = rng.uniform(-5, 5, size=size)
    return SparseVector((Dyadic(int(n), denominator_bits), float(c))
                        for n, c in zip(numerators, coefs) if c != 0.0)


def _report(label, ok, detail):
    print(f"\n{label}: {'PASS' if ok else 'FAIL'} ({detail})")


@pytest.mark.criterion(1, "oracle equivalence on 600 random vectors")
def test_oracle_equivalence():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for i in range(600):
        x = _random_vector(rng, 12)
        p = EXPONENTS[i % 3]
        fast = garling_norm(x, W, p).value
        slow = garling_norm_bruteforce(x, W, p)
        worst = max(worst, abs(fast - slow) / max(abs(slow), 1e-300))
    elapsed = time.perf_counter() - start
    _report("criterion 1", worst <= 1e-10 and elapsed < 10, f"rel err {worst:.2e}, {elapsed:.2f}s")
    assert worst <= 1e-10
    assert elapsed < 10


@pytest.mark.criterion(2, "unit vectors reproduce weight prefix sums up to 10^4")
def test_unit_vector_fundamental_function():
    ns = list(range(1, 201)) + list(range(250, 10001, 250))
    worst = 0.0
    for p in EXPONENTS:
        for n in ns:
            x = SparseVector._trusted([Dyadic(j) for j in range(1, n + 1)], np.ones(n))
            got = garling_norm(x, W, p).value ** p
            worst = max(worst, abs(got - W.prefix_sum(n)) / W.prefix_sum(n))
    _report("criterion 2", worst <= 1e-12, f"rel err {worst:.2e}")
    assert worst <= 1e-12


@pytest.mark.criterion(3, "shift and translation isometry on 200 random pairs")
def test_shift_isometry():
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(200):
        x = _random_vector(rng, 20)
        p = EXPONENTS[i % 3]
        gaps = rng.integers(1, 64, size=len(x))
        cur = Dyadic(int(rng.integers(-100, 100)), 3)
        phi = {}
        for q, g in zip(x.positions, gaps):
            cur = cur + Dyadic(int(g), int(rng.integers(0, 4)))
            phi[q] = cur
        base = garling_norm(x, W, p).value
        moved = garling_norm(x.shift(phi), W, p).value
        shifted = garling_norm(x.translate(Dyadic(int(rng.integers(-50, 50)), 2)), W, p).value
        worst = max(worst, abs(moved - base), abs(shifted - base))
    _report("criterion 3", worst <= 1e-12, f"max diff {worst:.2e}")
    assert worst <= 1e-12


@pytest.mark.criterion(4, "telescoping weight identity for N <= 10 at I = 10^4")
def test_weight_identity():
    worst = 0.0
    for n in range(1, 11):
        partial, remainder = W.weight_identity_partial(n, 10_000)
        worst = max(worst, abs(partial + remainder - W.prefix_sum(n)))
    _report("criterion 4", worst <= 1e-12, f"max diff {worst:.2e}")
    assert worst <= 1e-12


@pytest.mark.criterion(5, "positioning roundtrips for 100 random positionings")
def test_positioning_roundtrips():
    bad = 0
    for seed in range(100):
        eta = Positioning.random(seed)
        back = positioning_from_pi(pi_prefixes(eta, 200))
        bad += back.prefix(200) != eta.prefix(200)
        ranks = positioning_from_ranks(q_sequence(eta, 300))
        bad += ranks.prefix(300) != eta.prefix(300)
    _report("criterion 5", bad == 0, f"{bad} mismatches")
    assert bad == 0


def _direct_tail(seed, m, p):
    # sup over n of the seed tail, each norm by exhaustive enumeration
    length = seed.length
    a = seed.coefficients(length)
    best = 0.0
    for n in range(max(m, 1), length + 1):
        pi = pi_prefix(seed.eta, n).forward
        x = SparseVector((pi[j], a[j]) for j in range(m, n) if a[j] != 0.0)
        best = max(best, garling_norm_bruteforce(x, W, p))
    return best


@pytest.mark.criterion(6, "tail norms against direct suprema for 100 random seeds")
def test_tail_cross_check():
    rng = np.random.default_rng(6)
    worst, order_bad, coef_bad = 0.0, 0, 0
    for i in range(100):
        length = int(rng.integers(1, 11))
        coefs = rng.uniform(-3, 3, size=length)
        coefs[0] = coefs[0] or 1.0
        seed = Seed(coefs.tolist(), Positioning.random(int(rng.integers(1 << 31))))
        p = EXPONENTS[i % 3]
        tails = []
        for m in range(length + 1):
            value = e_tail(seed, m, W, p).value
            direct = _direct_tail(seed, m, p)
            worst = max(worst, abs(value - direct) / max(direct, 1e-300) if direct else value)
            tails.append(value)
        order_bad += sum(b > a * (1 + 1e-12) for a, b in zip(tails, tails[1:]))
        coef_bad += sum(abs(coefs[j - 1]) > tails[j - 2] * (1 + 1e-12)
                        for j in range(2, length + 1))
    ok = worst <= 1e-10 and order_bad == 0 and coef_bad == 0
    _report("criterion 6", ok, f"rel err {worst:.2e}, order {order_bad}, coef {coef_bad}")
    assert worst <= 1e-10
    assert order_bad == 0 and coef_bad == 0


@pytest.mark.criterion(7, "steve2 averages within 0.05 of 2 at n = 256")
def test_steve2_convergence():
    start = time.perf_counter()
    table = steve2_run(SparseVector({0: 1.0}), [1, 4, 16, 64, 256], W, 1.0)
    elapsed = time.perf_counter() - start
    values = [v for _, v in table.rows]
    bounded = all(v <= 2.0 + 1e-9 for v in values)
    gap = abs(values[-1] - 2.0)
    _report("criterion 7", bounded and gap <= 0.05 and elapsed < 30,
            f"norm at 256 = {values[-1]:.6f}, gap {gap:.4f}, {elapsed:.2f}s")
    assert bounded
    assert elapsed < 30
    assert gap <= 0.05


@pytest.mark.criterion(8, "non-symmetry witness with k = 4, eps = 0.5")
def test_nonsym_witness():
    start = time.perf_counter()
    try:
        wit = nonsym_search(eps=0.5, k=4, w=W, p=1.0)
    except SearchExhausted as exc:
        wit = exc.partial
    elapsed = time.perf_counter() - start
    ok = wit.forward_norm_p > 3.5 and wit.reverse_norm < 1.5 and elapsed < 60
    _report("criterion 8", ok, f"n = {wit.n}, forward^p {wit.forward_norm_p:.4f}, "
            f"reverse {wit.reverse_norm:.4f}, {elapsed:.2f}s")
    assert elapsed < 60
    assert wit.forward_norm_p > 3.5
    assert wit.reverse_norm < 1.5


@pytest.mark.criterion(9, "l-infinity witness on 1000 samples")
def test_linf_witness():
    rep = linf_witness(eps=0.25, k=4, w=W, p=1.0, samples=1000)
    _report("criterion 9", rep.passed and rep.checks == 1000,
            f"ratios in [{rep.min_ratio:.6f}, {rep.max_ratio:.6f}]")
    assert rep.checks == 1000
    assert rep.passed


@pytest.fixture(scope="module")
def depth3_tree():
    return tree_build(K=3, p=1.0, eps0=1.0, m0=1, branches=("111", "000"))


@pytest.mark.criterion(10, "tree of depth 3: invariants, level bounds, domination")
def test_tree_construction(depth3_tree):
    t = depth3_tree
    broken = [name for name, ok, _ in _tree_invariants(t) if not ok]
    level_fail = [(b, r["level"], r["bound"], r["status"])
                  for b in ("111", "000") for r in branch_report(t, b)["rows"]
                  if r["status"] != "pass"]
    dom = [r for r in domination_check(t, "000", "111") if r["status"] != "pass"]
    ok = not broken and not level_fail and not dom
    _report("criterion 10", ok, f"m = {t.m}, A = {[round(a, 4) for a in t.A]}, "
            f"invariants broken {broken}, level failures {level_fail}, domination {len(dom)}")
    assert not broken
    assert not dom
    assert not level_fail


@pytest.mark.criterion(11, "p-convexity on disjoint supports and Garling <= Lorentz")
def test_convexity_and_lorentz():
    rng = np.random.default_rng(11)
    convex_bad = lorentz_bad = 0
    for i in range(500):
        p = EXPONENTS[i % 3]
        blocks = [_random_vector(rng, 8) for _ in range(int(rng.integers(2, 5)))]
        whole = disjoint_concat(blocks, [200 * k for k in range(len(blocks))])
        lhs = garling_norm(whole, W, p).value ** p
        rhs = math.fsum(garling_norm(b, W, p).value ** p for b in blocks)
        convex_bad += lhs > rhs * (1 + 1e-10)
        x = _random_vector(rng, 30)
        lorentz_bad += garling_norm(x, W, p).value > lorentz_norm(x, W, p) * (1 + 1e-10)
    _report("criterion 11", convex_bad == 0 and lorentz_bad == 0,
            f"convexity {convex_bad}, lorentz {lorentz_bad}")
    assert convex_bad == 0
    assert lorentz_bad == 0
