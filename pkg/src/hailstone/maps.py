"""The ax+b map families and the basic iteration engine.

Three speeds of the same iteration are supported:

* ``C``: n -> a*n + b for odd n, n/2 for even n
* ``T``: n -> (a*n + b)/2 for odd n, n/2 for even n
* ``U``: n -> (a*n + b)/2^ord2(a*n + b), odd n only

All arithmetic uses Python integers, so nothing overflows.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class DomainError(ValueError):
    """Raised when a map or statistic is applied outside its domain."""


class Variant(str, enum.Enum):
    C = "C"
    T = "T"
    U = "U"


@dataclass(frozen=True)
class MapSpec:
    a: int = 3
    b: int = 1
    variant: Variant = Variant.T
    prune_modulus: int | None = None

    def __post_init__(self):
        if self.a < 3 or self.a % 2 == 0:
            raise ValueError(f"multiplier must be odd and >= 3, got {self.a}")
        if self.b % 2 == 0:
            raise ValueError(f"offset must be odd, got {self.b}")
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.prune_modulus is None:
            object.__setattr__(self, "prune_modulus", self.a)

    def __call__(self, n: int) -> int:
        return apply_map(self, n)

    @property
    def name(self) -> str:
        return f"{self.variant.value}{self.a}"

    def with_variant(self, variant) -> "MapSpec":
        return MapSpec(self.a, self.b, Variant(variant), self.prune_modulus)

    @classmethod
    def parse(cls, text: str) -> "MapSpec":
        """Parse names such as ``T3``, ``U5`` or ``C3``."""
        text = text.strip().upper()
        if len(text) < 2 or text[0] not in "CTU":
            raise ValueError(f"unknown map name {text!r}")
        return cls(a=int(text[1:]), variant=Variant(text[0]))


T3 = MapSpec(3)
T5 = MapSpec(5)
C3 = MapSpec(3, variant=Variant.C)
C5 = MapSpec(5, variant=Variant.C)
U3 = MapSpec(3, variant=Variant.U)
U5 = MapSpec(5, variant=Variant.U)


def ord2(n: int) -> int:
    """Exponent of the largest power of 2 dividing ``n``."""
    if n == 0:
        raise DomainError("ord2(0) is undefined")
    return (n & -n).bit_length() - 1


def apply_map(spec: MapSpec, n: int) -> int:
    if spec.variant is Variant.U:
        if n % 2 == 0:
            raise DomainError(f"accelerated map needs an odd input, got {n}")
        m = spec.a * n + spec.b
        if m == 0:
            raise DomainError(f"{n} maps to 0 under the accelerated map")
        return m >> ord2(m)
    if n & 1:
        m = spec.a * n + spec.b
        return m if spec.variant is Variant.C else m >> 1
    return n >> 1


class StopKind(str, enum.Enum):
    REACH = "reach"
    BELOW = "below"
    ABOVE = "above"
    STEPS = "steps"


@dataclass(frozen=True)
class Stop:
    """When to stop iterating.

    The condition is tested on the current value before each step, but
    only once at least ``min_steps`` steps have been taken (so a REACH
    with ``min_steps=1`` means "come back to v").
    """

    kind: StopKind
    value: int | float
    min_steps: int = 0

    @classmethod
    def reach(cls, v, min_steps=0):
        return cls(StopKind.REACH, v, min_steps)

    @classmethod
    def revisit(cls, v):
        return cls(StopKind.REACH, v, 1)

    @classmethod
    def below(cls, threshold):
        return cls(StopKind.BELOW, threshold)

    @classmethod
    def above(cls, threshold):
        return cls(StopKind.ABOVE, threshold)

    @classmethod
    def steps(cls, k):
        return cls(StopKind.STEPS, k)

    def met(self, value, k) -> bool:
        if k < self.min_steps:
            return False
        if self.kind is StopKind.REACH:
            return value == self.value
        if self.kind is StopKind.BELOW:
            return value < self.value
        if self.kind is StopKind.ABOVE:
            return value > self.value
        return k >= self.value


@dataclass
class Orbit:
    seed: int
    values: list[int]
    parity_bits: list[int]
    exponent_trace: list[int] = field(default_factory=list)
    truncated: bool = False

    @property
    def steps(self) -> int:
        return len(self.values) - 1

    def verify(self, spec: MapSpec) -> bool:
        """Re-check the chain invariant and the parity/exponent traces."""
        v = self.values
        if not v or v[0] != self.seed:
            return False
        for k in range(len(v) - 1):
            if apply_map(spec, v[k]) != v[k + 1]:
                return False
        if self.parity_bits != [x & 1 for x in v[: len(self.parity_bits)]]:
            return False
        if spec.variant is Variant.U:
            for k, e in enumerate(self.exponent_trace):
                if v[k + 1] << e != spec.a * v[k] + spec.b:
                    return False
        return True


def iterate(spec: MapSpec, seed: int, stop: Stop, budget: int) -> Orbit:
    """Iterate from ``seed`` until ``stop`` holds or ``budget`` steps are used."""
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    values = [seed]
    bits = []
    exps = []
    n = seed
    k = 0
    accelerated = spec.variant is Variant.U
    while not stop.met(n, k):
        if k >= budget:
            return Orbit(seed, values, bits, exps, truncated=True)
        bits.append(n & 1)
        if accelerated:
            m = spec.a * n + spec.b
            if n % 2 == 0 or m == 0:
                raise DomainError(f"accelerated map undefined at {n}")
            e = ord2(m)
            exps.append(e)
            n = m >> e
        else:
            n = apply_map(spec, n)
        values.append(n)
        k += 1
    return Orbit(seed, values, bits, exps, truncated=False)


def cycle_from(spec: MapSpec, start: int, max_len: int = 10_000) -> list[int]:
    """Return the cycle through ``start`` (as a list beginning at start).

    Raises ValueError if ``start`` does not return within ``max_len`` steps.
    """
    out = [start]
    n = apply_map(spec, start)
    while n != start:
        out.append(n)
        if len(out) > max_len:
            raise ValueError(f"{start} is not periodic within {max_len} steps")
        n = apply_map(spec, n)
    return out
