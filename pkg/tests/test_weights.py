import math
import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from garling import Weight, harmonic
from garling import weights as weights_module


def test_harmonic_values():
    w = harmonic()
    assert w.weight_at(1) == 1.0
    assert w.weight_at(4) == 0.25


def test_custom_prefix_reads_prefix_then_power_tail():
    w = Weight.from_doc({"kind": "custom", "prefix": [1.0, 0.9], "tail_alpha": 1.0})
    assert w.weight_at(2) == 0.9
    assert w.weight_at(4) == pytest.approx(0.9 * 2 / 4)


def test_explicit_weight_document():
    w = Weight.from_doc({"kind": "explicit", "values": [1.0, 0.5, 0.5],
                         "tail": {"rule": "power", "alpha": 0.5}})
    assert w.weight_at(3) == 0.5
    assert w.weight_at(12) == pytest.approx(0.5 * (3 / 12) ** 0.5)
    assert Weight.from_doc(w.to_doc()) == w


@pytest.mark.parametrize("n, expected", [(0, 0.0), (1, 1.0), (5, 1 + 1/2 + 1/3 + 1/4 + 1/5)])
def test_prefix_sum_examples(n, expected):
    assert harmonic().prefix_sum(n) == pytest.approx(expected, rel=1e-15, abs=0.0)


def test_weight_identity_examples():
    w = harmonic()
    assert w.weight_identity_partial(1, 1) == (0.5, 0.5)
    partial, rest = w.weight_identity_partial(4, 0)
    assert partial == 0.0 and rest == pytest.approx(w.prefix_sum(4))
    partial, _ = w.weight_identity_partial(5, 1000)
    assert abs(partial - w.prefix_sum(5)) <= 5 * w.weight_at(1001)


@pytest.mark.parametrize("doc", [
    {"kind": "power", "alpha": 0.0},
    {"kind": "power", "alpha": 1.5},
    {"kind": "custom", "prefix": [0.9, 0.5]},
    {"kind": "custom", "prefix": [1.0, 1.2]},
    {"kind": "custom", "prefix": [1.0, 0.0]},
    {"kind": "custom", "prefix": []},
    {"kind": "explicit", "values": [1.0], "tail": {"rule": "geometric"}},
    {"kind": "mystery"},
])
def test_invalid_weights_rejected(doc):
    with pytest.raises(ValueError):
        Weight.from_doc(doc)


def test_parse_specs():
    assert Weight.parse("power:1") == harmonic()
    assert Weight.parse("power:0.5").alpha == 0.5
    assert Weight.parse('{"kind":"power","alpha":0.25}').alpha == 0.25
    with pytest.raises(ValueError):
        Weight.parse("geometric:2")


weights = st.one_of(
    st.floats(0.05, 1.0).map(lambda a: Weight("power", a)),
    st.tuples(st.lists(st.floats(0.05, 1.0), min_size=1, max_size=6), st.floats(0.05, 1.0)).map(
        lambda t: Weight("custom", t[1], [1.0] + sorted(t[0], reverse=True))),
)


@given(weights, st.integers(0, 10), st.integers(0, 2000))
def test_identity_partial_plus_remainder(w, n, i):
    partial, rest = w.weight_identity_partial(n, i)
    assert partial + rest == pytest.approx(w.prefix_sum(n), rel=1e-12, abs=1e-15)


@given(weights)
def test_values_positive_non_increasing(w):
    v = np.asarray(w.values(5000))
    assert v[0] == 1.0
    assert np.all(v > 0) and np.all(np.diff(v) <= 0)


def test_harmonic_non_increasing_up_to_a_million():
    v = np.asarray(harmonic().values(10**6))
    assert np.all(v > 0) and np.all(np.diff(v) <= 0)


@given(weights, st.integers(0, 4000))
def test_prefix_sum_step_is_the_weight(w, n):
    # compensated sums carry a sub-ulp correction, so the step agrees to a few ulp
    step = w.prefix_sum(n + 1) - w.prefix_sum(n)
    assert step == pytest.approx(w.weight_at(n + 1), rel=0, abs=4 * math.ulp(w.prefix_sum(n + 1)))


def test_prefix_sums_are_correctly_rounded():
    n = 10**5
    exact = math.fsum(1.0 / j for j in range(1, n + 1))
    assert harmonic().prefix_sum(n) == exact


def test_range_sum_bounds_contain_true_sum():
    w = harmonic()
    lo, hi = w.range_sum_bounds(10, 5000)
    true = math.fsum(1.0 / j for j in range(10, 5001))
    assert lo <= true <= hi
    assert w.range_sum_bounds(7, 3) == (0.0, 0.0)


@pytest.mark.parametrize("alpha", [1.0, 0.5])
def test_range_sum_bounds_beyond_cache(monkeypatch, alpha):
    monkeypatch.setattr(weights_module, "CACHE_LIMIT", 1000)
    w = Weight("power", alpha)
    lo, hi = w.range_sum_bounds(10, 50000)
    true = math.fsum(j ** -alpha for j in range(10, 50001))
    assert lo <= true <= hi
    assert hi - lo <= 1e-3 * true
    with pytest.raises(ValueError):
        w.values(2000)


def test_concurrent_growth_is_consistent():
    w = harmonic()
    results = {}

    def grab(n):
        results[n] = np.asarray(w.prefix_sums(n)).copy()

    threads = [threading.Thread(target=grab, args=(n,)) for n in (100, 5000, 70000, 300, 70000)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    reference = np.asarray(harmonic().prefix_sums(70000))
    for n, sums in results.items():
        assert np.array_equal(sums, reference[:n + 1])


def test_caches_are_read_only():
    v = harmonic().values(10)
    with pytest.raises(ValueError):
        v[0] = 2.0
