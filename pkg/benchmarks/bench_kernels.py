"""Compare the compiled and pure-Python orbit kernels on the same seed range.

    python benchmarks/bench_kernels.py [--start 1] [--count 200000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from hailstone import _pykernels

try:
    from hailstone import _kernels
except ImportError:
    _kernels = None


def best_of(func, repeat, *args):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = func(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--start", type=int, default=1)
    ap.add_argument("--count", type=int, default=200_000)
    ap.add_argument("--a", type=int, default=3)
    ap.add_argument("--budget", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    call = (args.start, args.start + args.count, args.a, args.budget)

    t_py, ref = best_of(_pykernels.orbit_stats_range, 1, *call)
    print(f"python  {args.count:>9d} seeds  {t_py:8.3f} s  {args.count / t_py:12.0f} seeds/s")
    if _kernels is None:
        print("cython  extension not built (pip install -e . --no-build-isolation)")
        return
    t_cy, out = best_of(_kernels.orbit_stats_range, args.repeat, *call)
    print(f"cython  {args.count:>9d} seeds  {t_cy:8.3f} s  {args.count / t_cy:12.0f} seeds/s")
    same = all(np.array_equal(x, y) for x, y in zip(ref, out))
    print(f"speedup {t_py / t_cy:.1f}x   outputs identical: {same}")


if __name__ == "__main__":
    main()
