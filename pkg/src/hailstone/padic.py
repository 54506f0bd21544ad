"""Truncated 2-adic integers, the 2-adic extension of T and the parity
conjugacy Phi^-1.

A Dyadic is an explicit least-significant-first bit vector; every operation
that divides by 2 drops one bit, so the valid precision is always visible.
"""
from __future__ import annotations

from dataclasses import dataclass

from hailstone.maps import DomainError, MapSpec, Variant, apply_map
from hailstone.stochastic import stream


class PrecisionError(ValueError):
    pass


@dataclass(frozen=True)
class Dyadic:
    bits: tuple[int, ...]  # bit k is the coefficient of 2^k

    def __post_init__(self):
        if not self.bits:
            raise PrecisionError("a dyadic needs at least one valid bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    @property
    def precision(self) -> int:
        return len(self.bits)

    @classmethod
    def from_int(cls, n: int, m: int) -> "Dyadic":
        """n mod 2^m; negative n gives the 2-adic expansion (-1 = ...111)."""
        if m < 1:
            raise PrecisionError("precision must be >= 1")
        r = n % (1 << m)
        return cls(tuple((r >> k) & 1 for k in range(m)))

    def to_int(self) -> int:
        """Residue in [0, 2^m)."""
        return sum(b << k for k, b in enumerate(self.bits))

    def signed(self) -> int:
        """Residue in [-2^(m-1), 2^(m-1))."""
        r = self.to_int()
        return r - (1 << self.precision) if self.bits[-1] else r

    def truncate(self, m: int) -> "Dyadic":
        if m > self.precision:
            raise PrecisionError(f"only {self.precision} bits are valid, asked for {m}")
        return Dyadic(self.bits[:m])

    def agrees(self, other: "Dyadic", m: int | None = None) -> bool:
        m = min(self.precision, other.precision) if m is None else m
        return self.bits[:m] == other.bits[:m]

    def __str__(self):
        return "..." + "".join(str(b) for b in reversed(self.bits))


def _check_spec(spec):
    if spec.variant is Variant.U:
        raise DomainError("the accelerated map has no 2-adic extension here")
    if spec.variant is not Variant.T:
        raise DomainError("2-adic extension is defined for the T maps")


def apply_map_2adic(spec: MapSpec, alpha: Dyadic) -> Dyadic:
    """T(alpha) = alpha/2 or (a*alpha + b)/2 by the parity of bit 0; one bit is lost."""
    _check_spec(spec)
    m = alpha.precision
    if m < 2:
        raise PrecisionError("2-adic map needs precision >= 2")
    if alpha.bits[0] == 0:
        return Dyadic(alpha.bits[1:])
    w = (spec.a * alpha.to_int() + spec.b) % (1 << m)
    return Dyadic.from_int(w >> 1, m - 1)


def shift_2adic(alpha: Dyadic) -> Dyadic:
    if alpha.precision < 2:
        raise PrecisionError("shift needs precision >= 2")
    return Dyadic(alpha.bits[1:])


def phi_inverse(spec: MapSpec, alpha: Dyadic, m: int) -> Dyadic:
    """First m bits of Phi^-1(alpha): bit k is the parity of T^k(alpha).

    Bit k needs T^k(alpha) to precision 1, so alpha must carry m bits.
    """
    _check_spec(spec)
    if m < 1:
        raise PrecisionError("m must be >= 1")
    if alpha.precision < m:
        raise PrecisionError(f"Phi^-1 to {m} bits needs {m} input bits, got {alpha.precision}")
    out = []
    x = alpha.truncate(m)
    for k in range(m):
        out.append(x.bits[0])
        if k < m - 1:
            x = apply_map_2adic(spec, x)
    return Dyadic(tuple(out))


def phi_inverse_int(spec: MapSpec, n: int, m: int) -> int:
    """Phi^-1(n) mod 2^m from the exact integer orbit of n."""
    r = 0
    for k in range(m):
        r |= (n & 1) << k
        n = apply_map(spec, n)
    return r


def _random_int(rng, bits: int) -> int:
    v = int.from_bytes(rng.bytes((bits + 7) // 8), "little") >> ((-bits) % 8)
    return v if rng.random() < 0.5 else -v


@dataclass(frozen=True)
class Evidence:
    check: str
    map: str
    bits: int
    trials: int
    failures: int
    first_failure: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self):
        return {"check": self.check, "map": self.map, "bits": self.bits, "trials": self.trials,
                "failures": self.failures, "passed": self.passed}


def verify_solenoidal(spec: MapSpec, n: int, trials: int, seed: int,
                      corrupt: bool = False) -> Evidence:
    """x = y (mod 2^n) implies Phi^-1(x) = Phi^-1(y) (mod 2^n), on exact
    integer orbits of random pairs. With ``corrupt`` one of the low n bits of
    y is flipped, so every trial should fail (negative control)."""
    _check_spec(spec)
    rng = stream(seed, "padic", 0)
    failures = 0
    first = None
    mod = 1 << n
    for _ in range(trials):
        x = _random_int(rng, 3 * n)
        y = x + mod * _random_int(rng, 2 * n)
        if corrupt:
            y ^= 1 << int(rng.integers(0, n))
        px = phi_inverse_int(spec, x, n)
        py = phi_inverse_int(spec, y, n)
        if px != py:
            failures += 1
            first = first or (x, y)
    return Evidence("solenoidal" + ("-corrupt" if corrupt else ""), spec.name, n, trials,
                    failures, first)


def verify_conjugacy(spec: MapSpec, samples: int, m: int, seed: int) -> Evidence:
    """Phi^-1(T(alpha)) and S(Phi^-1(alpha)) agree in their first m-1 bits,
    for random alpha carried at precision 2m + 2."""
    _check_spec(spec)
    rng = stream(seed, "padic", 1)
    prec = 2 * m + 2
    failures = 0
    first = None
    for _ in range(samples):
        alpha = Dyadic(tuple(int(b) for b in rng.integers(0, 2, prec)))
        lhs = phi_inverse(spec, apply_map_2adic(spec, alpha), m - 1)
        rhs = shift_2adic(phi_inverse(spec, alpha, m))
        if not lhs.agrees(rhs, m - 1):
            failures += 1
            first = first or (alpha.to_int(),)
    return Evidence("conjugacy", spec.name, m, samples, failures, first)
