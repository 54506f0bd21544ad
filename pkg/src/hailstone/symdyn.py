"""Symbolic dynamics: parity vectors, stopping densities and the
exponent-sequence structure of the accelerated map."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from hailstone.maps import DomainError, MapSpec, Variant, apply_map, ord2


@dataclass(frozen=True)
class ParityVector:
    bits: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.bits)

    def code(self) -> int:
        """Bits packed little-endian into an integer."""
        return sum(b << i for i, b in enumerate(self.bits))


def parity_vector(spec: MapSpec, n: int, k: int) -> ParityVector:
    if k < 1:
        raise ValueError("k must be >= 1")
    bits = []
    for _ in range(k):
        bits.append(n & 1)
        n = apply_map(spec, n)
    return ParityVector(tuple(bits))


def parity_codes(a: int, seeds: np.ndarray, k: int) -> np.ndarray:
    """Packed parity vectors of T_a for an array of positive seeds (int64).

    Values grow at most by a factor a/2 per step, so k is limited by int64.
    """
    if (a ** k) * int(seeds.max()) >= 2**62:
        raise ValueError("seeds/depth too large for int64 parity codes")
    v = seeds.astype(np.int64).copy()
    code = np.zeros(len(v), dtype=np.int64)
    for i in range(k):
        odd = v & 1
        code |= odd << i
        v = np.where(odd == 1, (a * v + 1) >> 1, v >> 1)
    return code


@dataclass
class BijectionReport:
    map_name: str
    k: int
    bijective: bool
    multiplicities: dict[int, int]


def verify_parity_bijection(spec: MapSpec, k: int, max_k: int = 26) -> BijectionReport:
    """Check that n -> S^[k](n) is a bijection from 1..2^k onto {0,1}^k.

    ``multiplicities`` maps "number of seeds sharing a pattern" to how many
    patterns have it; a bijection gives {1: 2^k}.
    """
    if spec.variant is not Variant.T:
        raise DomainError("parity vectors are defined for the T maps")
    if not 1 <= k <= max_k:
        raise ValueError(f"k must be in 1..{max_k}")
    seeds = np.arange(1, 2**k + 1, dtype=np.int64)
    counts = np.bincount(parity_codes(spec.a, seeds, k), minlength=2**k)
    mult = dict(zip(*map(lambda x: x.tolist(), np.unique(counts, return_counts=True))))
    return BijectionReport(spec.name, k, mult == {1: 2**k}, mult)


# -- stopping densities -----------------------------------------------------

@dataclass
class DensityReport:
    k: int
    lam: Fraction
    direction: str
    stopped: int
    total: int
    unstopped_count: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.stopped, self.total)

    @property
    def unstopped_exponent(self) -> float:
        """log2(unstopped_count)/k."""
        return math.log2(self.unstopped_count) / self.k if self.unstopped_count else float("-inf")

    def to_dict(self) -> dict:
        d = self.density
        return {"k": self.k, "lambda": str(self.lam), "stopped": self.stopped,
                "total": self.total, "density_num": d.numerator, "density_den": d.denominator}


def _stops(a, i, j, lam, direction):
    # pattern with j odd steps among i steps scales n by a^j/2^i
    lhs = a**j * lam.denominator
    rhs = lam.numerator << i
    if direction == "below":
        return lhs < rhs
    # T^i(n) = (a^j n + c)/2^i with c > 0 once j >= 1, so a tie already exceeds
    return lhs > rhs or (lhs == rhs and j >= 1)


def stopping_density(spec: MapSpec, k: int, lam=1, direction: str | None = None,
                     method: str = "dp") -> DensityReport:
    """Exact density of seeds whose lambda-stopping time is at most k.

    A parity pattern with j odd steps out of i multiplies n by a^j/2^i (up
    to a vanishing additive term); it stops at the first prefix where that
    product drops below lambda (``direction='below'``, the 3x+1 default)
    or rises above it (``'above'``, the 5x+1 default). Stopped prefixes
    are pruned. ``method='dp'`` aggregates live patterns by (i, j);
    ``method='enumerate'`` walks every live pattern individually.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if direction is None:
        direction = "below" if spec.a == 3 else "above"
    if direction not in ("below", "above"):
        raise ValueError("direction must be 'below' or 'above'")
    a = spec.a
    if method == "dp":
        unstopped = _unstopped_dp(a, k, lam, direction)
    elif method == "enumerate":
        unstopped = _unstopped_enumerate(a, k, lam, direction)
    else:
        raise ValueError("method must be 'dp' or 'enumerate'")
    total = 2**k
    return DensityReport(k, lam, direction, total - unstopped, total, unstopped)


def _unstopped_dp(a, k, lam, direction):
    if _stops(a, 0, 0, lam, direction):
        return 0
    alive = {0: 1}
    for i in range(1, k + 1):
        nxt = {}
        for j, c in alive.items():
            for jj in (j, j + 1):
                if not _stops(a, i, jj, lam, direction):
                    nxt[jj] = nxt.get(jj, 0) + c
        alive = nxt
    return sum(alive.values())


def _unstopped_enumerate(a, k, lam, direction):
    if _stops(a, 0, 0, lam, direction):
        return 0
    count = 0
    stack = [(0, 0)]
    while stack:
        i, j = stack.pop()
        if i == k:
            count += 1
            continue
        for jj in (j, j + 1):
            if not _stops(a, i + 1, jj, lam, direction):
                stack.append((i + 1, jj))
    return count


# -- exponent sequences of the accelerated map -------------------------------

def _check_unit(n, g):
    if n % 2 == 0 or n % g == 0:
        raise DomainError(f"{n} is not coprime to {2 * g}")


def o_sequence(n: int, k: int, g: int = 3) -> tuple[int, ...]:
    """Exponents o_i = ord2(g*U^(i-1)(n) + 1) removed by the first k steps of U."""
    _check_unit(n, g)
    out = []
    for _ in range(k):
        m = g * n + 1
        e = ord2(m)
        out.append(e)
        n = m >> e
    return tuple(out)


def _u_power(n, exps, g=3):
    for e in exps:
        n = (g * n + 1) >> e
    return n


def compositions(s: int, k: int):
    """All compositions of s into k positive parts, in lexicographic order."""
    for cuts in itertools.combinations(range(1, s), k - 1):
        bounds = (0,) + cuts + (s,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(k))


def least_element(eps: int, exps, g: int = 3) -> int:
    """Least n = eps (mod 2g) whose first k U-exponents are ``exps``.

    Back-substitute x_{i-1} = (2^{o_i} x_i - 1)/g from x_k = 1 as a rational,
    reduce mod 2^{s+1} (g^k is a 2-adic unit), then CRT with n = eps (mod g).
    """
    if eps % 2 == 0 or eps % g == 0:
        raise DomainError(f"class {eps} is not coprime to {2 * g}")
    s = sum(exps)
    x = Fraction(1)
    for e in reversed(exps):
        x = (x * 2**e - 1) / g
    mod2 = 2 ** (s + 1)
    r2 = x.numerator * pow(x.denominator, -1, mod2) % mod2
    # find n = r2 (mod 2^{s+1}) with n = eps (mod g)
    t = (eps - r2) * pow(mod2, -1, g) % g
    return r2 + mod2 * t


def least_element_search(eps: int, exps, g: int = 3) -> int | None:
    s = sum(exps)
    k = len(exps)
    for n in range(eps % (2 * g), 2 * g * 2**s, 2 * g):
        if n > 0 and o_sequence(n, k, g) == tuple(exps):
            return n
    return None


@dataclass
class OComposition:
    epsilon: int
    exponents: tuple[int, ...]
    least_element: int
    r: int
    delta: int
    verified: bool

    @property
    def size(self) -> int:
        return sum(self.exponents)


def iterated_structure(eps: int, exps, m_checks: int = 3, search: bool = False) -> OComposition:
    """Least element n0 of the exponent class and U^k(n0) = 6 r_k + delta_k.

    Verifies that every n0 + 6*2^s*m (m < m_checks) has the same exponents
    and U^k value U^k(n0) + 6*3^k*m, and that delta_k = 2^{o_k} (mod 3).
    """
    exps = tuple(exps)
    if not exps or min(exps) < 1:
        raise ValueError("exponents must be positive")
    k, s = len(exps), sum(exps)
    n0 = least_element_search(eps, exps) if search else least_element(eps, exps)
    if n0 is None:
        raise RuntimeError(f"no seed found for class {eps}, exponents {exps}")
    u = _u_power(n0, exps)
    r, delta = divmod(u, 6)
    ok = o_sequence(n0, k) == exps and n0 < 6 * 2**s and n0 % 6 == eps
    ok = ok and delta in (1, 5) and delta % 3 == pow(2, exps[-1], 3)
    for m in range(1, m_checks):
        n = n0 + 6 * 2**s * m
        ok = ok and o_sequence(n, k) == exps and _u_power(n, exps) == u + 6 * 3**k * m
    return OComposition(eps, exps, n0, r, delta, ok)


@dataclass
class StructureReport:
    epsilon: int
    k: int
    s: int
    expected: int
    hits: dict[tuple[int, ...], list[int]] = field(default_factory=dict)
    progression_ok: bool = True
    construction_ok: bool = True

    @property
    def passed(self) -> bool:
        return (len(self.hits) == self.expected
                and all(len(v) == 1 for v in self.hits.values())
                and self.progression_ok and self.construction_ok)

    @property
    def class_density(self) -> Fraction:
        """Share of the seeds = eps (mod 6) in one period sitting in each class."""
        return Fraction(1, 2**self.s)


def _prefix_hits(eps, s):
    """For every seed n = eps (mod 6) below 6*2^s, the exponent prefix
    whose running sum first reaches or passes s."""
    out = []
    for n in range(eps, 6 * 2**s, 6):
        exps = []
        total = 0
        x = n
        while total < s:
            m = 3 * x + 1
            e = ord2(m)
            exps.append(e)
            total += e
            x = m >> e
        out.append((n, tuple(exps), total))
    return out


def _reports_for(eps, s, ks, m_checks):
    prefixes = _prefix_hits(eps, s)
    reports = {}
    for k in ks:
        rep = StructureReport(eps, k, s, comb(s - 1, k - 1))
        for n, exps, total in prefixes:
            if total == s and len(exps) == k:
                rep.hits.setdefault(exps, []).append(n)
        for exps, ns in rep.hits.items():
            oc = iterated_structure(eps, exps, m_checks)
            rep.progression_ok &= oc.verified
            rep.construction_ok &= oc.least_element == ns[0]
        reports[k] = rep
    return reports


def verify_structure_theorem(eps: int, k: int, s: int, m_checks: int = 3) -> StructureReport:
    """Each composition of s into k parts is the exponent prefix of exactly
    one n = eps (mod 6) below 6*2^s, and the class is that progression."""
    if eps not in (1, 5):
        raise DomainError("eps must be 1 or 5")
    if not 1 <= k <= s:
        raise ValueError("need 1 <= k <= s")
    return _reports_for(eps, s, [k], m_checks)[k]


def verify_structure_range(s_max: int, m_checks: int = 3) -> list[StructureReport]:
    """All (eps, k, s) with 1 <= k <= s <= s_max, one enumeration per (eps, s)."""
    out = []
    for eps in (1, 5):
        for s in range(1, s_max + 1):
            out.extend(_reports_for(eps, s, range(1, s + 1), m_checks).values())
    return out


def _rk_masses(k, s_max):
    masses = {}
    for eps in (1, 5):
        for s in range(k, s_max + 1):
            w = Fraction(1, 2 * 2**s)
            for exps in compositions(s, k):
                n0 = least_element(eps, exps)
                r, delta = divmod(_u_power(n0, exps), 6)
                key = (r, delta)
                masses[key] = masses.get(key, 0) + w
    return masses


def tail_mass(k: int, s_max: int) -> Fraction:
    """Mass of exponent classes with size above s_max (sizes start at k)."""
    return 1 - sum(Fraction(comb(s - 1, k - 1), 2**s) for s in range(k, s_max + 1))


@dataclass
class EntropyReport:
    k: int
    s_max: int
    entropy: float
    max_entropy: float
    tail: float
    support: int

    @property
    def deficit(self) -> float:
        return self.max_entropy - self.entropy


def entropy_rk(k: int, s_max: int) -> EntropyReport:
    """Entropy of r_k from the exponent classes with size <= s_max.

    Each (eps, composition) carries weight 2^-s / 2; the truncated masses
    are renormalised before taking -sum p ln p and the cut mass is reported.
    """
    if s_max < k:
        raise ValueError("s_max must be >= k")
    by_r = {}
    for (r, _), w in _rk_masses(k, s_max).items():
        by_r[r] = by_r.get(r, 0) + w
    total = float(sum(by_r.values()))
    p = np.array([float(w) for w in by_r.values()]) / total
    h = float(-(p * np.log(p)).sum())
    return EntropyReport(k, s_max, h, k * math.log(3), float(tail_mass(k, s_max)), len(by_r))


def entropy_of(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


@dataclass
class DigitReport:
    k: int
    t: int
    masses: dict[tuple[tuple[int, ...], int], float]
    tail: float

    def limit(self, delta) -> float:
        return (1 / 3**self.t) * (1 / 3 if delta == 1 else 2 / 3)

    @property
    def max_deviation(self) -> float:
        """Largest |mass/(1 - tail) - limit| over all cells."""
        keep = 1 - self.tail
        cells = [(d, dl) for d in itertools.product(range(3), repeat=self.t) for dl in (1, 5)]
        return max(abs(self.masses.get(c, 0.0) / keep - self.limit(c[1])) for c in cells)


def leading_digit_distribution(k: int, t: int, s_max: int = 20) -> DigitReport:
    """Joint masses of the top t base-3 digits of r_k (k digits) and delta_k."""
    if not 0 <= t <= k:
        raise ValueError("need 0 <= t <= k")
    out = {}
    for (r, delta), w in _rk_masses(k, s_max).items():
        digits = tuple((r // 3 ** (k - 1 - i)) % 3 for i in range(t))
        key = (digits, delta)
        out[key] = out.get(key, 0) + w
    return DigitReport(k, t, {key: float(w) for key, w in out.items()}, float(tail_mass(k, s_max)))
