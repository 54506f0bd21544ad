"""Per-seed orbit statistics and exhaustive record scans."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from hailstone._backend import kernels
from hailstone._parallel import chunk_bounds, map_chunks
from hailstone.maps import DomainError, MapSpec, Variant, apply_map

STATISTICS = ("gamma", "t", "rho", "sigma", "ones_ratio")


def default_budget(spec: MapSpec) -> int:
    return 10**5 if spec.a == 3 else 10**4


def _budget(spec, budget):
    return default_budget(spec) if budget is None else budget


def _as_fraction(lam) -> Fraction:
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return lam


def lambda_stopping_time(spec: MapSpec, n: int, lam=1, budget=None):
    """Least k >= 0 with T^k(n) < lam*n, or None if the budget runs out."""
    if n < 1:
        raise DomainError("lambda-stopping time needs n >= 1")
    lam = _as_fraction(lam)
    bound = lam * n
    budget = _budget(spec, budget)
    v = n
    for k in range(budget + 1):
        if v < bound:
            return k
        if k < budget:
            v = apply_map(spec, v)
    return None


def lambda_plus_stopping_time(spec: MapSpec, n: int, lam=1, budget=None):
    """Least k >= 0 with T^k(n) > lam*n, or None if the budget runs out."""
    if n < 1:
        raise DomainError("lambda-plus stopping time needs n >= 1")
    lam = _as_fraction(lam)
    if lam < 1:
        raise ValueError("lambda-plus stopping time needs lambda >= 1")
    bound = lam * n
    budget = _budget(spec, budget)
    v = n
    for k in range(budget + 1):
        if v > bound:
            return k
        if k < budget:
            v = apply_map(spec, v)
    return None


def _first_step_to_one(spec):
    # For the 5x+1 map the total stopping time counts k >= 1, so 1 itself
    # goes once around its cycle.
    return 0 if spec.a == 3 else 1


def _walk_to_one(spec, n, budget):
    """Return (steps, odd terms before 1) or None on budget exhaustion."""
    min_steps = _first_step_to_one(spec)
    v = n
    k = odd = 0
    while not (v == 1 and k >= min_steps):
        if k >= budget:
            return None
        odd += v & 1
        v = apply_map(spec, v)
        k += 1
    return k, odd


def total_stopping_time(spec: MapSpec, n: int, budget=None):
    if n < 1:
        raise DomainError("total stopping time needs n >= 1")
    res = _walk_to_one(spec, n, _budget(spec, budget))
    return None if res is None else res[0]


def ones_count(spec: MapSpec, n: int, budget=None) -> int:
    """Number of odd terms among n, T(n), ..., T^(sigma-1)(n).

    These are the 1s of the parity vector of length sigma_inf(n); for
    odd seeds it equals the number of odd values among T(n), ..., T^sigma(n).
    """
    if n < 1:
        raise DomainError("ones count needs n >= 1")
    res = _walk_to_one(spec, n, _budget(spec, budget))
    if res is None:
        raise DomainError(f"{n} does not reach 1 within the budget")
    return res[1]


@dataclass(frozen=True)
class Excursion:
    value: int
    truncated: bool


def _excursion(spec, n, budget, better):
    seen = {n}
    best = n
    v = n
    for _ in range(budget):
        v = apply_map(spec, v)
        if better(v, best):
            best = v
        if v in seen:
            return Excursion(best, False)
        seen.add(v)
    return Excursion(best, True)


def max_excursion(spec: MapSpec, n: int, budget=None) -> Excursion:
    """Largest value on the orbit of n, seed and terminal cycle included.

    Iteration stops when a value repeats (exact) or the budget runs out
    (``truncated`` set, value is the max over the prefix).
    """
    if n < 1:
        raise DomainError("max excursion needs n >= 1")
    return _excursion(spec, n, _budget(spec, budget), lambda v, b: v > b)


def min_excursion(spec: MapSpec, n: int, budget=None) -> Excursion:
    """Value of least absolute value on the orbit of n."""
    return _excursion(spec, n, _budget(spec, budget), lambda v, b: abs(v) < abs(b))


@dataclass
class SeedStats:
    seed: int
    sigma_lambda: int | None
    sigma_infty: int | None
    ones: int | None
    max_excursion: int
    min_excursion: int
    gamma_ratio: float | None
    rho_ratio: float | None
    ones_ratio: float | None
    budget_exhausted: bool


def seed_stats(spec: MapSpec, n: int, lam=1, budget=None) -> SeedStats:
    budget = _budget(spec, budget)
    walk = _walk_to_one(spec, n, budget)
    tmax = max_excursion(spec, n, budget)
    tmin = min_excursion(spec, n, budget)
    sigma = ones = None
    gamma = ratio = rho = None
    if walk is not None:
        sigma, ones = walk
        if sigma > 0:
            ratio = ones / sigma
        if n >= 2:
            gamma = sigma / math.log(n)
    if n >= 2:
        rho = math.log(tmax.value) / math.log(n)
    return SeedStats(
        seed=n,
        sigma_lambda=lambda_stopping_time(spec, n, lam, budget),
        sigma_infty=sigma,
        ones=ones,
        max_excursion=tmax.value,
        min_excursion=tmin.value,
        gamma_ratio=gamma,
        rho_ratio=rho,
        ones_ratio=ratio,
        budget_exhausted=walk is None or tmax.truncated,
    )


# -- range scans ------------------------------------------------------------

@dataclass
class ScanArrays:
    """Per-seed statistics for a contiguous range of seeds.

    ``sigma`` is -1 where 1 was not reached within the budget. ``tmax`` is
    the prefix maximum (the terminal cycle is folded in for seeds that
    reach 1); it is an object array when some value exceeds int64.
    """

    start: int
    sigma: np.ndarray
    ones: np.ndarray
    tmax: np.ndarray

    @property
    def seeds(self) -> np.ndarray:
        return np.arange(self.start, self.start + len(self.sigma), dtype=np.int64)


def _python_stats(spec, n, budget):
    min_steps = _first_step_to_one(spec)
    v = n
    k = odd = 0
    mx = n
    while not (v == 1 and k >= min_steps):
        if k >= budget:
            return -1, 0, mx
        odd += v & 1
        v = apply_map(spec, v)
        k += 1
        if v > mx:
            mx = v
    return k, odd, mx


def _cycle_max_through_one(spec):
    best = v = 1
    for _ in range(10_000):
        v = apply_map(spec, v)
        best = max(best, v)
        if v == 1:
            return best
    raise ValueError("1 is not periodic for this map")


def scan_chunk(spec: MapSpec, start: int, stop: int, budget: int) -> ScanArrays:
    if start < 1:
        raise DomainError("range scans need positive seeds")
    if spec.variant is Variant.T and spec.b == 1:
        sigma, ones, tmax, status = kernels.orbit_stats_range(
            start, stop, spec.a, budget, _first_step_to_one(spec))
        over = np.flatnonzero(status == 2)
        if len(over):
            tmax = tmax.astype(object)
            for i in over:
                sigma[i], ones[i], tmax[i] = _python_stats(spec, start + int(i), budget)
    else:
        rows = [_python_stats(spec, n, budget) for n in range(start, stop)]
        sigma = np.array([r[0] for r in rows], dtype=np.int64)
        ones = np.array([r[1] for r in rows], dtype=np.int64)
        big = any(r[2] >= 2**63 for r in rows)
        tmax = np.array([r[2] for r in rows], dtype=object if big else np.int64)
    reached = sigma >= 0
    if reached.any():
        cmax = _cycle_max_through_one(spec)
        tmax[reached] = np.maximum(tmax[reached], cmax)
    return ScanArrays(start, sigma, ones, tmax)


def _float_log(x):
    if x.dtype == object:
        return np.array([math.log(int(v)) for v in x])
    return np.log(x.astype(np.float64))


def statistic_values(stat: str, arr: ScanArrays) -> tuple[np.ndarray, np.ndarray]:
    """Return (values, defined mask) of a record statistic over a chunk."""
    seeds = arr.seeds
    logn = np.log(seeds.astype(np.float64))
    ok = arr.sigma >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        if stat == "gamma":
            vals = arr.sigma / logn
            ok = ok & (seeds >= 2)
        elif stat == "sigma":
            vals = arr.sigma.astype(np.float64)
        elif stat == "ones_ratio":
            vals = arr.ones / arr.sigma
            ok = ok & (arr.sigma > 0)
        elif stat == "t":
            vals = arr.tmax
            ok = np.ones(len(seeds), dtype=bool)
        elif stat == "rho":
            vals = _float_log(arr.tmax) / logn
            ok = seeds >= 2
        else:
            raise ValueError(f"unknown statistic {stat!r}; choose from {STATISTICS}")
    return vals, ok


def _chunk_candidates(spec, stat, lo, hi, budget):
    """Records of one chunk taken in isolation (a superset of global records)."""
    arr = scan_chunk(spec, lo, hi, budget)
    vals, ok = statistic_values(stat, arr)
    idx = np.flatnonzero(ok)
    out = []
    best = None
    for i in idx:
        v = vals[i]
        if best is None or v > best:
            best = v
            out.append((int(arr.start + i), v, int(arr.sigma[i]), int(arr.ones[i]), int(arr.tmax[i])))
    return out, int(np.count_nonzero(arr.sigma < 0))


def _chunk_candidates_fast(spec, stat, lo, hi, budget):
    arr = scan_chunk(spec, lo, hi, budget)
    vals, ok = statistic_values(stat, arr)
    n_trunc = int(np.count_nonzero(arr.sigma < 0))
    if arr.tmax.dtype == object:
        return _chunk_candidates(spec, stat, lo, hi, budget)
    v = np.where(ok, vals, -np.inf).astype(np.float64) if stat != "t" else np.where(ok, vals, -1)
    prev = np.maximum.accumulate(v)
    is_rec = np.empty(len(v), dtype=bool)
    is_rec[0] = ok[0]
    is_rec[1:] = (v[1:] > prev[:-1]) & ok[1:]
    out = [(int(arr.start + i), vals[i].item(), int(arr.sigma[i]), int(arr.ones[i]), int(arr.tmax[i]))
           for i in np.flatnonzero(is_rec)]
    return out, n_trunc


@dataclass
class RecordEntry:
    k: int
    n: int
    value: float | int
    sigma: int | None
    ones: int | None
    t: int

    @property
    def ones_ratio(self):
        return self.ones / self.sigma if self.sigma else None

    @property
    def gamma(self):
        return self.sigma / math.log(self.n) if self.sigma is not None and self.n >= 2 else None

    @property
    def r(self):
        return self.t / self.n**2

    @property
    def rho(self):
        return math.log(self.t) / math.log(self.n) if self.n >= 2 else None


@dataclass
class RecordList:
    statistic: str
    map_name: str
    start: int
    stop: int
    entries: list[RecordEntry] = field(default_factory=list)
    n_truncated: int = 0

    @property
    def seeds(self):
        return [e.n for e in self.entries]

    def columns(self):
        if self.statistic in ("t", "rho"):
            return ("k", "n", "t", "r", "rho")
        return ("k", "n", "sigma", "ones", "ones_ratio", "gamma")

    def rows(self):
        for e in self.entries:
            if self.statistic in ("t", "rho"):
                yield (e.k, e.n, e.t, f"{e.r:.6f}", "" if e.rho is None else f"{e.rho:.6f}")
            else:
                yield (e.k, e.n, e.sigma, e.ones,
                       "" if e.ones_ratio is None else f"{e.ones_ratio:.6f}",
                       "" if e.gamma is None else f"{e.gamma:.6f}")

    def write_csv(self, stream):
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(self.columns())
        w.writerows(self.rows())


DEFAULT_START = {"gamma": 3, "ones_ratio": 3, "sigma": 3, "t": 2, "rho": 2}


def scan_records(spec: MapSpec, statistic: str, stop: int, start: int | None = None,
                 budget: int | None = None, workers: int = 1,
                 chunk: int = 1 << 18) -> RecordList:
    """Strict records of ``statistic`` over seeds ``start <= n <= stop``.

    Seeds are cut into fixed-size chunks, each chunk reports its own
    running records, and those are merged in seed order, so the result
    does not depend on ``workers``. Seeds that do not reach 1 within the
    budget are skipped for sigma-based statistics and counted.
    """
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}; choose from {STATISTICS}")
    if start is None:
        start = DEFAULT_START[statistic]
    budget = _budget(spec, budget)
    tasks = [(spec, statistic, lo, hi, budget) for lo, hi in chunk_bounds(start, stop + 1, chunk)]
    parts = map_chunks(_chunk_candidates_fast, tasks, workers)
    out = RecordList(statistic, spec.name, start, stop)
    best = None
    for cands, n_trunc in parts:
        out.n_truncated += n_trunc
        for n, v, sigma, ones, t in cands:
            if best is None or v > best:
                best = v
                out.entries.append(RecordEntry(len(out.entries) + 1, n, v,
                                               sigma if sigma >= 0 else None,
                                               ones if sigma >= 0 else None, t))
    return out


def _exceed_chunk(spec, lo, hi, budget, threshold, odd_only):
    arr = scan_chunk(spec, lo, hi, budget)
    out = []
    for i, n in enumerate(range(lo, hi)):
        if odd_only and n % 2 == 0:
            continue
        if n >= 2 and int(arr.tmax[i]) > n**threshold:
            out.append(n)
    return out


def rho_exceedances(spec: MapSpec, stop: int, start: int = 3, threshold: int = 2,
                    odd_only: bool = True, budget=None, workers: int = 1,
                    chunk: int = 1 << 18) -> list[int]:
    """Seeds n in [start, stop) with t(n) > n**threshold, i.e. rho(n) > threshold.

    The comparison is done on integers, so it is exact.
    """
    budget = _budget(spec, budget)
    tasks = [(spec, lo, hi, budget, threshold, odd_only) for lo, hi in chunk_bounds(start, stop, chunk)]
    return [n for part in map_chunks(_exceed_chunk, tasks, workers) for n in part]


# -- scaled trajectories ----------------------------------------------------

@dataclass
class ScaledTrajectory:
    seed: int
    points: list[tuple[float, float]]
    overlays: dict[str, list[tuple[float, float]]]
    truncated: bool


def excursion_overlay():
    """Vertices of the predicted two-segment extreme-excursion shape."""
    rise = 0.75 * math.log(3) - math.log(2)
    fall = -0.5 * math.log(0.75)
    x1 = 1 / rise
    return [(0.0, 1.0), (x1, 2.0), (x1 + 2 / fall, 0.0)]


def scaled_trajectory(spec: MapSpec, n: int, budget=None) -> ScaledTrajectory:
    """Points (k/ln n, ln T^k(n)/ln n) for k = 0..sigma_inf(n)."""
    from hailstone.ld import MGF, solve_gamma

    if n < 2:
        raise DomainError("scaled trajectory needs n >= 2")
    budget = _budget(spec, budget)
    logn = math.log(n)
    v = n
    pts = [(0.0, 1.0)]
    k = 0
    truncated = False
    while v != 1:
        if k >= budget:
            truncated = True
            break
        v = apply_map(spec, v)
        k += 1
        pts.append((k / logn, math.log(v) / logn))
    gamma = solve_gamma(MGF.rrw(spec.a)) if spec.a == 3 else None
    overlays = {"excursion": excursion_overlay()} if spec.a == 3 else {}
    if gamma is not None:
        overlays["rrw"] = [(0.0, 1.0), (gamma, 0.0)]
    return ScaledTrajectory(n, pts, overlays, truncated)
