"""Wall-clock comparison of the numba and numpy kernel backends.

Usage: ``python3 benchmarks/bench_kernels.py [--sizes 500,2000,8000] [--repeat 3]``

Both backends are importable regardless of ``GARLING_BACKEND``; the flag only
chooses which one the public names dispatch to.
"""

import argparse
import time

import numpy as np

from garling import harmonic
from garling.kernels import (
    compensated_cumsum_numba,
    compensated_cumsum_numpy,
    garling_dp_numba,
    garling_dp_numpy,
)


def best_time(fn, *args, repeat=3):
    fn(*args)  # compile / warm caches
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="500,2000,8000")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]

    rng = np.random.default_rng(0)
    w = harmonic()
    print(f"{'kernel':<18}{'size':>8}{'numba [s]':>14}{'numpy [s]':>14}{'speed-up':>10}")
    for n in sizes:
        vals = rng.random(n)
        weights = w.values(n)
        fast = best_time(garling_dp_numba, vals, weights, repeat=args.repeat)
        slow = best_time(garling_dp_numpy, vals, weights, repeat=args.repeat)
        print(f"{'garling_dp':<18}{n:>8}{fast:>14.5f}{slow:>14.5f}{slow / fast:>10.1f}")
    for n in sizes:
        x = rng.random(n * 100)
        fast = best_time(compensated_cumsum_numba, x, 0.0, 0.0, repeat=args.repeat)
        slow = best_time(compensated_cumsum_numpy, x, 0.0, 0.0, repeat=args.repeat)
        print(f"{'compensated_cumsum':<18}{n * 100:>8}{fast:>14.5f}{slow:>14.5f}"
              f"{slow / fast:>10.1f}")


if __name__ == "__main__":
    main()
