import os
import subprocess
import sys

import numpy as np
import pytest

from garling import kernels
from garling._accel import HAVE_NUMBA


def _cases():
    rng = np.random.default_rng(7)
    yield np.empty(0)
    yield np.array([1.0])
    for size in (2, 5, 17, 64, 257):
        yield rng.random(size) ** 3
    yield np.ones(300)


@pytest.mark.parametrize("vals", list(_cases()), ids=lambda v: f"n{len(v)}")
def test_dp_backends_agree(vals):
    w = 1.0 / np.arange(1, len(vals) + 1)
    fast = kernels.garling_dp_numba(vals, w) if len(vals) else 0.0
    slow = kernels.garling_dp_numpy(vals, w) if len(vals) else 0.0
    assert fast == pytest.approx(slow, rel=1e-14, abs=0.0)


def test_dp_unit_vectors_give_prefix_sum():
    n = 2000
    w = 1.0 / np.arange(1, n + 1)
    exact = sum(1.0 / j for j in range(1, n + 1))
    assert kernels.garling_dp(np.ones(n), w) == pytest.approx(exact, rel=1e-15)


def test_dp_rejects_short_weights():
    with pytest.raises(ValueError):
        kernels.garling_dp(np.ones(3), np.ones(2))


def test_dp_empty_is_zero():
    assert kernels.garling_dp(np.empty(0), np.empty(0)) == 0.0


def test_cumsum_backends_bit_identical():
    rng = np.random.default_rng(3)
    x = rng.random(5000) / np.arange(1, 5001)
    a = kernels.compensated_cumsum_numba(x, 0.0, 0.0)
    b = kernels.compensated_cumsum_numpy(x, 0.0, 0.0)
    assert np.array_equal(a[0], b[0])
    assert a[1:] == b[1:]


def test_cumsum_carry_matches_single_pass():
    x = 1.0 / np.arange(1, 10001)
    whole, _, _ = kernels.compensated_cumsum(x)
    first, s, c = kernels.compensated_cumsum(x[:3333])
    second, _, _ = kernels.compensated_cumsum(x[3333:], s, c)
    assert np.array_equal(whole, np.concatenate([first, second]))


def test_cumsum_empty():
    out, s, c = kernels.compensated_cumsum(np.empty(0), 1.5, 0.0)
    assert out.shape == (0,) and s == 1.5 and c == 0.0


def _backend_in_subprocess(value):
    env = dict(os.environ, GARLING_BACKEND=value)
    return subprocess.run(
        [sys.executable, "-c", "import garling.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True,
    )


def test_env_flag_selects_numpy():
    proc = _backend_in_subprocess("numpy")
    assert proc.returncode == 0 and proc.stdout.strip() == "numpy"


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_env_flag_selects_numba():
    proc = _backend_in_subprocess("numba")
    assert proc.returncode == 0 and proc.stdout.strip() == "numba"


def test_env_flag_rejects_unknown_backend():
    proc = _backend_in_subprocess("fortran")
    assert proc.returncode != 0 and "GARLING_BACKEND" in proc.stderr
