"""Leading digits, mantissas and discrepancy of iterate logarithms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from hailstone.maps import MapSpec, apply_map
from hailstone.stochastic import stream


def mantissa(n: int, base=10) -> float:
    """n / B^floor(log_B n), a value in [1, B)."""
    if n < 1:
        raise ValueError("mantissa needs n >= 1")
    if base <= 1:
        raise ValueError("base must exceed 1")
    if isinstance(base, int):
        e = int(math.log(n) / math.log(base))
        while base ** (e + 1) <= n:
            e += 1
        while e > 0 and base**e > n:
            e -= 1
        return n / base**e
    frac = math.log(n) / math.log(base)
    return base ** (frac - math.floor(frac))


def log_base(n: int, base) -> float:
    return math.log(n) / math.log(base)


@dataclass(frozen=True)
class DiscrepancyReport:
    k: int
    discrepancy: float
    sup: float
    inf: float
    base: float | None = None


def discrepancy(values, base=None) -> DiscrepancyReport:
    """sup - inf over a in [0,1) of #{y < a}/k - a, for the values mod 1.

    From the sorted sample y_(1) <= ... <= y_(k): the sup is approached just
    right of y_(i) (value i/k - y_(i)) and the inf is attained at a = y_(i)
    (value (i-1)/k - y_(i)); a = 0 contributes 0 to both. Ties need no special
    care because the extreme index of a tie group wins automatically.
    Fractions are kept exact; floats go through numpy.
    """
    vals = list(values) if not isinstance(values, np.ndarray) else values
    k = len(vals)
    if k == 0:
        raise ValueError("discrepancy of an empty sample")
    if isinstance(vals, np.ndarray) or not any(isinstance(v, Fraction) for v in vals):
        y = np.sort(np.mod(np.asarray(vals, dtype=float), 1.0))
        i = np.arange(1, k + 1)
        sup = max(0.0, float(np.max(i / k - y)))
        inf = min(0.0, float(np.min((i - 1) / k - y)))
    else:
        y = sorted(v - math.floor(v) for v in vals)
        sup = max([Fraction(0)] + [Fraction(i + 1, k) - v for i, v in enumerate(y)])
        inf = min([Fraction(0)] + [Fraction(i, k) - v for i, v in enumerate(y)])
    return DiscrepancyReport(k, sup - inf, sup, inf, base)


def discrepancy_bound(n_iterates: int) -> float:
    return 2 * n_iterates ** (-1 / 36)


@dataclass
class BenfordRow:
    seed: int
    n_used: int
    discrepancy: float
    bound: float
    violated: bool
    short: bool  # orbit reached 1 before N iterates


@dataclass
class BenfordScan:
    base: float
    n_iterates: int
    x_max: int
    rows: list[BenfordRow] = field(default_factory=list)

    @property
    def mean_discrepancy(self) -> float:
        return float(np.mean([r.discrepancy for r in self.rows]))

    @property
    def violation_fraction(self) -> float:
        full = [r for r in self.rows if not r.short]
        return sum(r.violated for r in full) / len(full) if full else 0.0

    @property
    def short_seeds(self) -> int:
        return sum(r.short for r in self.rows)


def orbit_log_sample(spec: MapSpec, x0: int, n_iterates: int, base) -> tuple[list[float], bool]:
    """log_B x_k for k = 1..N (fewer if the orbit reaches 1 first)."""
    out = []
    x = x0
    for _ in range(n_iterates):
        if x == 1:
            return out, True
        x = apply_map(spec, x)
        out.append(log_base(x, base))
    return out, False


def benford_scan(spec: MapSpec, base, n_iterates: int, x_max: int, samples: int,
                 seed: int) -> BenfordScan:
    """Discrepancy of {log_B x_k mod 1 : 1 <= k <= N} for random seeds x0 <= X."""
    if n_iterates < 2:
        raise ValueError("need N >= 2")
    if x_max < 2**n_iterates:
        raise ValueError("seeds must range up to at least 2^N")
    rng = stream(seed, "benford", 0)
    scan = BenfordScan(base, n_iterates, x_max)
    bound = discrepancy_bound(n_iterates)
    for _ in range(samples):
        x0 = 1 + int(rng.integers(0, x_max))
        logs, short = orbit_log_sample(spec, x0, n_iterates, base)
        d = discrepancy(logs).discrepancy if logs else 1.0
        scan.rows.append(BenfordRow(x0, len(logs), d, bound, d > bound, short))
    return scan


def _accelerated_power(g, x, k):
    x = x.copy()
    for _ in range(k):
        m = g * x + 1
        low = m & -m
        x = m // low
    return x


def km_shifted_distribution(g: int, k: int, x_max: int, base=10) -> DiscrepancyReport:
    """Discrepancy of w_k = log_B U^k(x0) - log_B x0 - k log_B(g/4) mod 1
    over all x0 <= x_max coprime to 2g."""
    x = np.arange(1, x_max + 1, dtype=np.int64)
    x = x[(x % 2 == 1) & (x % g != 0)]
    if float(x_max) * (g / 2 + 1) ** k >= 2**62:
        raise ValueError("seed range too large for int64 iteration")
    y = _accelerated_power(g, x, k)
    lb = math.log(base)
    w = (np.log(y.astype(float)) - np.log(x.astype(float))) / lb - k * math.log(g / 4) / lb
    return discrepancy(np.mod(w, 1.0), base)
