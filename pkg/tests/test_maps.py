import pytest
from hypothesis import given, strategies as st

from hailstone.maps import (C3, T3, T5, U3, U5, DomainError, MapSpec, Stop, Variant,
                            apply_map, cycle_from, iterate, ord2)


@pytest.mark.parametrize("spec,n,image", [
    (T3, 3, 5), (T3, -5, -7), (T5, 1, 3), (U3, 17, 13), (C3, 3, 10), (T3, 0, 0),
])
def test_apply_map_examples(spec, n, image):
    assert apply_map(spec, n) == image


def test_accelerated_rejects_even():
    with pytest.raises(DomainError):
        apply_map(U3, 4)


@pytest.mark.parametrize("n,e", [(8, 3), (22, 1), (7, 0), (-12, 2)])
def test_ord2(n, e):
    assert ord2(n) == e


def test_ord2_zero():
    with pytest.raises(DomainError):
        ord2(0)


def test_parse_and_name():
    assert MapSpec.parse("T3") == T3
    assert MapSpec.parse("U5") == U5
    assert T5.name == "T5"
    assert T3.prune_modulus == 3
    with pytest.raises(ValueError):
        MapSpec(4)


def test_iterate_to_one():
    orb = iterate(T3, 3, Stop.reach(1), 100)
    assert orb.values == [3, 5, 8, 4, 2, 1]
    assert orb.steps == 5 and not orb.truncated
    assert iterate(T3, 1, Stop.reach(1), 100).steps == 0


def test_iterate_revisit_5x_cycle():
    orb = iterate(T5, 13, Stop.revisit(13), 100)
    assert orb.steps == 7
    assert orb.values[1:-1] == [33, 83, 208, 104, 52, 26]


def test_iterate_budget_truncates():
    orb = iterate(T3, 27, Stop.reach(1), 10)
    assert orb.truncated and orb.steps == 10


def test_negative_cycles():
    assert sorted(cycle_from(T3, -5)) == [-10, -7, -5]
    assert cycle_from(T3, -1) == [-1]


def test_accelerated_trace():
    orb = iterate(U3, 7, Stop.reach(1), 100)
    assert orb.verify(U3)
    assert orb.exponent_trace[:3] == [1, 1, 2]


@given(st.integers(-10**30, 10**30), st.sampled_from([T3, T5, C3]))
def test_orbit_invariants(n, spec):
    orb = iterate(spec, n, Stop.steps(30), 30)
    assert orb.verify(spec)
    assert orb.parity_bits == [v & 1 for v in orb.values[:-1]]


@given(st.integers(1, 10**40).map(lambda m: 2 * m + 1))
def test_accelerated_equals_halving_run(n):
    # U(n) is T applied once, then halved until odd
    v = apply_map(T3, n)
    while v % 2 == 0:
        v //= 2
    assert apply_map(U3, n) == v


@given(st.integers(-10**20, 10**20))
def test_collatz_vs_halved(n):
    c = apply_map(C3, n)
    assert apply_map(T3, n) == (c // 2 if n & 1 else c)
    assert C3.with_variant(Variant.T) == T3
