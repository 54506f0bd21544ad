"""Random walk and branching random walk models of forward and backward
iteration.

Randomness comes from counter-based Philox streams keyed by
(seed, purpose, block index); blocks have a fixed size, so a run gives the
same numbers whether its blocks are processed serially or by a pool.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from hailstone._parallel import map_chunks

WALK_BLOCK = 2048
STEP_CHUNK = 256

_TAGS = {"path": 1, "walk": 2, "rrw": 3, "bp": 4, "benford": 5, "padic": 6}


def stream(seed: int, tag: str, index: int) -> np.random.Generator:
    """Independent reproducible generator for (seed, tag, index)."""
    ss = np.random.SeedSequence(seed, spawn_key=(_TAGS[tag], index))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class WalkModel:
    """Additive steps in log scale: atoms of (probability, step)."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if abs(sum(p for p, _ in self.atoms) - 1) > 1e-12:
            raise ValueError("step probabilities must sum to 1")

    @classmethod
    def collatz(cls, g: int = 3) -> "WalkModel":
        """Even step -ln 2, odd step ln(g/2), each with probability 1/2."""
        return cls(((0.5, -math.log(2)), (0.5, math.log(g / 2))))

    @property
    def mu(self) -> float:
        return sum(p * s for p, s in self.atoms)

    @property
    def sigma(self) -> float:
        """Standard deviation of one step."""
        return math.sqrt(sum(p * (s - self.mu) ** 2 for p, s in self.atoms))

    def _tables(self):
        probs = np.array([p for p, _ in self.atoms])
        steps = np.array([s for _, s in self.atoms])
        return np.cumsum(probs)[:-1], steps

    def draw(self, rng, size) -> np.ndarray:
        """Steps picked by inverse CDF from rng.random(size)."""
        cdf, steps = self._tables()
        return steps[np.searchsorted(cdf, rng.random(size), side="right")]


def brw_path(model: WalkModel, z0: float, steps: int, rng) -> np.ndarray:
    """Partial sums z0, z0 + xi_1, ..., z0 + xi_1 + ... + xi_steps."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    out = np.empty(steps + 1)
    out[0] = z0
    if steps:
        out[1:] = z0 + np.cumsum(model.draw(rng, steps))
    return out


def _first_passage_block(model, z0s, seed, tag, index, budget, track_extremes):
    """Walk a block of starts until each first hits <= 0 (k >= 1) or budget."""
    rng = stream(seed, tag, index)
    z = np.array(z0s, dtype=float)
    n = len(z)
    hit = np.full(n, -1, dtype=np.int64)
    zmax = z.copy()
    zmin = z.copy()
    live = np.ones(n, dtype=bool)
    done = 0
    while done < budget and (track_extremes or live.any()):
        width = min(STEP_CHUNK, budget - done)
        steps = model.draw(rng, (n, width))
        path = z[:, None] + np.cumsum(steps, axis=1)
        below = path <= 0
        first = np.where(below.any(axis=1), below.argmax(axis=1), -1)
        new = live & (first >= 0)
        hit[new] = done + first[new] + 1
        live &= ~new
        if track_extremes:
            zmax = np.maximum(zmax, path.max(axis=1))
            zmin = np.minimum(zmin, path.min(axis=1))
        z = path[:, -1]
        done += width
    return hit, zmax, zmin


def first_passage_times(model: WalkModel, z0: float, trials: int, seed: int,
                        budget: int = 10**5, workers: int = 1) -> np.ndarray:
    """S = min{k >= 1 : Z_k <= 0} for ``trials`` walks from z0 (-1 if not within budget)."""
    tasks = []
    for b, lo in enumerate(range(0, trials, WALK_BLOCK)):
        size = min(WALK_BLOCK, trials - lo)
        tasks.append((model, [z0] * size, seed, "walk", b, budget, False))
    parts = map_chunks(_first_passage_block, tasks, workers)
    return np.concatenate([p[0] for p in parts]) if parts else np.zeros(0, dtype=np.int64)


def normalized_stopping(s: np.ndarray, z0: float, model: WalkModel) -> np.ndarray:
    """(S - z0/|mu|) / (|mu|^(-3/2) sigma sqrt(z0)), asymptotically N(0,1)."""
    mu = abs(model.mu)
    return (s - z0 / mu) / (mu ** -1.5 * model.sigma * math.sqrt(z0))


def ks_to_normal(sample: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance between a sample and N(0,1)."""
    from scipy import stats

    return float(stats.kstest(sample, "norm").statistic)


@dataclass
class RRWResult:
    seeds: np.ndarray
    s_inf: np.ndarray  # -1 where the walk stayed above 0 within the budget
    log_tmax: np.ndarray  # max of Z over the walked steps (seed included)
    log_tmin: np.ndarray  # min of Z over the walked steps (seed included)
    budget: int


def rrw_trial(model: WalkModel, start: int, stop: int, seed: int,
              budget: int = 10**4, workers: int = 1) -> RRWResult:
    """One independent walk from ln n for each seed start <= n < stop.

    The walk for n uses the stream of its seed block n // WALK_BLOCK, so it
    is the same however the range is split.
    """
    if start < 1 or stop <= start:
        raise ValueError("need 1 <= start < stop")
    tasks = []
    first_block, last_block = start // WALK_BLOCK, (stop - 1) // WALK_BLOCK
    for b in range(first_block, last_block + 1):
        z0s = np.log(np.arange(b * WALK_BLOCK, (b + 1) * WALK_BLOCK, dtype=float).clip(1))
        tasks.append((model, z0s, seed, "rrw", b, budget, True))
    parts = map_chunks(_first_passage_block, tasks, workers)
    hit = np.concatenate([p[0] for p in parts])
    zmax = np.concatenate([p[1] for p in parts])
    zmin = np.concatenate([p[2] for p in parts])
    lo = start - first_block * WALK_BLOCK
    sl = slice(lo, lo + stop - start)
    return RRWResult(np.arange(start, stop), hit[sl], zmax[sl], zmin[sl], budget)


# -- branching random walk ---------------------------------------------------

@dataclass(frozen=True)
class BranchModel:
    """Tree model of backward iteration for the gx+1 map.

    j = 0: each individual has an even child (shift ln 2) and, with
    probability 1/g, also an odd child (shift ln(2/g)). j >= 1: individuals
    carry a residue mod g^j; each picks one of the g lifts mod g^(j+1)
    uniformly and then follows the pruned inverse map exactly.
    """

    g: int = 3
    j: int = 0

    def __post_init__(self):
        if self.g not in (3, 5):
            raise ValueError("g must be 3 or 5")
        if self.j < 0:
            raise ValueError("j must be >= 0")

    @property
    def shifts(self):
        return math.log(2), math.log(2 / self.g)

    def offspring(self, types, u):
        """Children of individuals with residue ``types`` given uniforms ``u``.

        Returns (even child types, mask of individuals with an odd child,
        odd child types for those).
        """
        g = self.g
        if self.j == 0:
            has_odd = u < 1 / g
            return types, has_odd, types[has_odd]
        mod = g**self.j
        lift = types + mod * np.minimum((u * g).astype(np.int64), g - 1)
        even = (2 * lift) % mod
        m = 2 * lift - 1
        cand = (m % g) == 0
        odd_full = np.where(cand, m // g, 0)
        has_odd = cand & ((odd_full % g) != 0)
        return even, has_odd, odd_full[has_odd] % mod


@dataclass
class Realization:
    seed: int | None
    g: int
    j: int
    K: int
    root_position: float
    counts: list[int]
    first_birth: list[float]
    positions: list[np.ndarray] | None
    truncated: bool
    prune_above: float | None = None

    @property
    def generations(self) -> int:
        return len(self.counts) - 1

    def to_json(self) -> dict:
        return {"seed": self.seed, "K": self.K, "N_k": self.counts,
                "L_star": [round(x, 12) for x in self.first_birth], "truncated": self.truncated}


def bp_grow(model: BranchModel, K: int, rng=None, seed: int | None = None, root: int = 1,
            cap: int = 10**7, keep_positions: bool = True,
            prune_above: float | None = None) -> Realization:
    """Grow K generations from one individual at position ln(root).

    ``rng`` may be any object with ``random(size)``; by default the stream
    for ``seed`` is used. Growth stops with ``truncated`` set if a generation
    would exceed ``cap``. With ``prune_above`` individuals whose position
    exceeds it are dropped together with their descendants (some of which
    would have come back down, so counts below the level are lower bounds)
    and growth continues up to K generations or until nobody is left.
    """
    if rng is None:
        if seed is None:
            raise ValueError("give rng or seed")
        rng = stream(seed, "bp", 0)
    g = model.g
    if model.j and root % g == 0:
        raise ValueError("root must not be divisible by g")
    even_shift, odd_shift = model.shifts
    pos = np.array([math.log(root)])
    types = np.array([root % g**model.j if model.j else 0], dtype=np.int64)
    counts = [1]
    first = [float(pos[0])]
    kept = [pos] if keep_positions else None
    truncated = False
    for _ in range(K):
        if len(pos) == 0:
            break
        u = rng.random(len(pos))
        even_t, has_odd, odd_t = model.offspring(types, u)
        new_pos = np.concatenate([pos + even_shift, pos[has_odd] + odd_shift])
        new_types = np.concatenate([even_t, odd_t])
        if prune_above is not None:
            keep = new_pos <= prune_above
            new_pos, new_types = new_pos[keep], new_types[keep]
        if len(new_pos) > cap:
            truncated = True
            break
        pos, types = new_pos, new_types
        counts.append(len(pos))
        first.append(float(pos.min()) if len(pos) else math.inf)
        if keep_positions:
            kept.append(pos)
    return Realization(seed, g, model.j, K, math.log(root), counts, first, kept, truncated, prune_above)


def bp_growth_rate(real: Realization) -> float:
    """ln N_K / K for the last generation grown."""
    k = real.generations
    if k == 0:
        raise ValueError("no generations grown")
    return math.log(real.counts[k]) / k


def first_birth_series(real: Realization) -> list[float]:
    """L_k*/k for k = 1..K."""
    return [real.first_birth[k] / k for k in range(1, real.generations + 1)]


def bp_inverse_count(real: Realization, x: float) -> int:
    """Individuals (all generations, root included) with position <= ln x."""
    if real.positions is None:
        raise ValueError("realization was grown without positions")
    lx = math.log(x)
    if real.prune_above is not None and lx > real.prune_above:
        raise ValueError("x lies above the pruning level of this realization")
    return int(sum(np.count_nonzero(p <= lx) for p in real.positions))


def _one_realization(model, K, seed, index, cap):
    rng = stream(seed, "bp", index)
    real = bp_grow(model, K, rng=rng, cap=cap, keep_positions=False)
    real.seed = index
    return real


def bp_realizations(model: BranchModel, K: int, count: int, seed: int,
                    cap: int = 10**7, workers: int = 1) -> list[Realization]:
    """``count`` independent realizations; realization i uses stream (seed, i)."""
    tasks = [(model, K, seed, i, cap) for i in range(count)]
    return map_chunks(_one_realization, tasks, workers)


@dataclass
class GrowthSummary:
    mean: float
    std: float
    rates: list[float] = field(default_factory=list)

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(len(self.rates))


def growth_rate_summary(reals: list[Realization]) -> GrowthSummary:
    rates = [bp_growth_rate(r) for r in reals]
    return GrowthSummary(float(np.mean(rates)), float(np.std(rates, ddof=1)) if len(rates) > 1 else 0.0, rates)


@dataclass
class InverseCountFit:
    slope: float
    counts: dict[float, int]
    generations: int
    truncated: bool


def bp_cell_inverse_counts(model: BranchModel, xs, top: float, rng, max_generations: int = 200_000,
                           cap: int = 2**62) -> tuple[np.ndarray, int, bool]:
    """I*(x) for each x in ``xs``, growing a j = 0 tree on cell counts.

    With j = 0 an individual's position is fixed by its generation k and its
    number of odd steps o (k ln 2 - o ln g), and individuals sharing (k, o)
    reproduce independently. So it is enough to carry one count per cell:
    every individual keeps its even child and Binomial(count, 1/g) of them
    add an odd child one cell over. This is the same law as growing the
    individuals, at a cost per generation of the number of occupied cells.
    Cells above ``top`` are dropped.
    """
    if model.j:
        raise ValueError("cell growth needs j = 0")
    l2, lg = math.log(2), math.log(model.g)
    lx = np.log(np.asarray(xs, dtype=float))
    if top < lx.max():
        raise ValueError("pruning level lies below the largest x")
    totals = np.zeros(len(lx), dtype=np.int64)
    o = np.zeros(1, dtype=np.int64)
    n = np.ones(1, dtype=np.int64)
    k = 0
    truncated = False
    while len(n):
        pos = k * l2 - o * lg
        totals += np.array([n[pos <= v].sum() for v in lx], dtype=np.int64)
        if k == max_generations:
            truncated = True
            break
        odd = rng.binomial(n, 1 / model.g)
        # cells are sorted by o, so the merged cell o+1 gets n[o+1] + odd[o]
        new_o = np.union1d(o, o + 1)
        new_n = np.zeros(len(new_o), dtype=np.int64)
        new_n[np.searchsorted(new_o, o)] += n
        new_n[np.searchsorted(new_o, o + 1)] += odd
        k += 1
        keep = (k * l2 - new_o * lg <= top) & (new_n > 0)
        o, n = new_o[keep], new_n[keep]
        if len(n) and (n.max() > cap // 4 or totals.max() > cap // 4):
            truncated = True
            break
    return totals, k, truncated


def inverse_count_slope(model: BranchModel, seed: int, x_lo: float = 1e2, x_hi: float = 1e5,
                        points: int = 13, margin: float | None = None, max_generations: int = 200_000,
                        cap: int = 10**7, index: int = 0) -> InverseCountFit:
    """Least-squares slope of ln I*(x) against ln x on log-spaced x, for the
    realization grown from stream (seed, index).

    Individuals above ln(x_hi) + margin are dropped. Their descendants do come
    back down (for g = 5 the slope moves from about 0.58 at margin 3 to 0.66
    from margin 14 on), so j = 0 models default to a margin of 20 nats, grown
    on cell counts. j >= 1 models grow individuals and default to 3.
    """
    rng = stream(seed, "bp", index)
    xs = np.geomspace(x_lo, x_hi, points)
    if model.j == 0:
        top = math.log(x_hi) + (20.0 if margin is None else margin)
        totals, gens, truncated = bp_cell_inverse_counts(model, xs, top, rng, max_generations)
    else:
        top = math.log(x_hi) + (3.0 if margin is None else margin)
        real = bp_grow(model, max_generations, rng=rng, cap=cap, prune_above=top)
        totals = np.array([bp_inverse_count(real, x) for x in xs])
        gens, truncated = real.generations, real.truncated
    slope = float(np.polyfit(np.log(xs), np.log(totals), 1)[0])
    return InverseCountFit(slope, {float(x): int(c) for x, c in zip(xs, totals)}, gens, truncated)


def _slope_task(model, seed, index, x_lo, x_hi, margin):
    return inverse_count_slope(model, seed, x_lo, x_hi, margin=margin, index=index)


def median_inverse_count_slope(model: BranchModel, seed: int, count: int = 101, x_lo: float = 1e2,
                               x_hi: float = 1e5, margin: float | None = None,
                               workers: int = 1) -> tuple[float, list[InverseCountFit]]:
    """Median of the per-realization slopes over ``count`` realizations.

    A single tree fluctuates a lot in its first generations (a slow start
    shifts the whole count curve), so one fit is a poor estimate.
    """
    tasks = [(model, seed, i, x_lo, x_hi, margin) for i in range(count)]
    fits = map_chunks(_slope_task, tasks, workers)
    return float(np.median([f.slope for f in fits])), fits
