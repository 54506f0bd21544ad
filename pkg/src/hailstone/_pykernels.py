"""Pure-Python twin of the compiled kernels (identical semantics)."""
import numpy as np


def orbit_stats_range(start, stop, a, budget, min_steps=0):
    """Scan seeds ``start <= n < stop`` under T_a (a odd, positive seeds).

    Returns four arrays: sigma (steps to reach 1, -1 if not reached),
    ones (odd terms among the first sigma iterates, seed included),
    tmax (largest value seen, seed included) and status
    (0 reached 1, 1 budget exhausted, 2 int64 overflow; never 2 here).
    """
    size = stop - start
    sigma = np.full(size, -1, dtype=np.int64)
    ones = np.zeros(size, dtype=np.int64)
    tmax = np.zeros(size, dtype=np.int64)
    status = np.zeros(size, dtype=np.int8)
    for i in range(size):
        v = start + i
        k = o = 0
        mx = v
        st = 0
        while True:
            if v == 1 and k >= min_steps:
                break
            if k >= budget:
                st = 1
                break
            if v & 1:
                o += 1
                v = (a * v + 1) >> 1
            else:
                v >>= 1
            k += 1
            if v > mx:
                mx = v
        status[i] = st
        if st == 0:
            sigma[i] = k
            ones[i] = o
        # python ints never overflow, but the array does
        tmax[i] = mx if mx < 2**63 else -1
        if mx >= 2**63:
            status[i] = 2
            sigma[i] = -1
    return sigma, ones, tmax, status
