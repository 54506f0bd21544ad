import pytest
from hypothesis import given, strategies as st

from hailstone.maps import T3, T5, U3, DomainError, apply_map
from hailstone.padic import (Dyadic, PrecisionError, apply_map_2adic, phi_inverse, phi_inverse_int,
                             shift_2adic, verify_conjugacy, verify_solenoidal)

MAPS = st.sampled_from([T3, T5])


def test_dyadic_roundtrip():
    d = Dyadic.from_int(-1, 8)
    assert d.bits == (1,) * 8 and d.signed() == -1 and d.to_int() == 255
    assert Dyadic.from_int(5, 4).bits == (1, 0, 1, 0)
    with pytest.raises(PrecisionError):
        Dyadic(())
    with pytest.raises(ValueError):
        Dyadic((0, 2))


def test_apply_map_examples():
    out = apply_map_2adic(T3, Dyadic.from_int(3, 20))
    assert out == Dyadic.from_int(5, 19)
    minus_one = Dyadic.from_int(-1, 20)
    assert apply_map_2adic(T3, minus_one) == Dyadic.from_int(-1, 19)
    assert apply_map_2adic(T3, Dyadic.from_int(0, 20)) == Dyadic.from_int(0, 19)
    with pytest.raises(PrecisionError):
        apply_map_2adic(T3, Dyadic((1,)))
    with pytest.raises(DomainError):
        apply_map_2adic(U3, minus_one)


def test_shift_examples():
    assert shift_2adic(Dyadic((1, 0, 1))).bits == (0, 1)
    assert shift_2adic(Dyadic.from_int(0, 9)) == Dyadic.from_int(0, 8)
    assert shift_2adic(Dyadic.from_int(-1, 9)) == Dyadic.from_int(-1, 8)


def test_phi_inverse_examples():
    assert phi_inverse(T3, Dyadic.from_int(0, 10), 10).to_int() == 0
    assert phi_inverse(T3, Dyadic.from_int(-1, 10), 10).signed() == -1
    assert phi_inverse(T3, Dyadic.from_int(1, 4), 4).to_int() == 0b0101
    # the full value is -1/3: 3 * Phi^-1(1) = -1 mod 2^m
    m = 30
    assert (3 * phi_inverse(T3, Dyadic.from_int(1, m), m).to_int() + 1) % 2**m == 0
    with pytest.raises(PrecisionError):
        phi_inverse(T3, Dyadic.from_int(1, 4), 5)


@given(st.integers(-10**30, 10**30), MAPS, st.integers(2, 60))
def test_integer_compatibility(n, spec, m):
    out = apply_map_2adic(spec, Dyadic.from_int(n, m))
    assert out.precision == m - 1
    assert out == Dyadic.from_int(apply_map(spec, n), m - 1)
    assert phi_inverse(spec, Dyadic.from_int(n, m), m).to_int() == phi_inverse_int(spec, n, m)


@given(st.integers(0, 2**80), MAPS, st.integers(2, 40), st.integers(1, 40))
def test_precision_not_overstated(r, spec, m, extra):
    # recomputing from more input bits never changes the bits already claimed
    lo = Dyadic.from_int(r, m)
    hi = Dyadic.from_int(r, m + extra)
    assert apply_map_2adic(spec, hi).agrees(apply_map_2adic(spec, lo))
    assert phi_inverse(spec, hi, m + extra).agrees(phi_inverse(spec, lo, m), m)


@given(st.integers(0, 2**64), MAPS, st.integers(2, 30))
def test_conjugacy_property(r, spec, m):
    alpha = Dyadic.from_int(r, 2 * m + 2)
    lhs = phi_inverse(spec, apply_map_2adic(spec, alpha), m - 1)
    rhs = shift_2adic(phi_inverse(spec, alpha, m))
    assert lhs == rhs


def test_phi_inverse_is_bijection_mod_2k():
    k = 10
    for spec in (T3, T5):
        images = {phi_inverse(spec, Dyadic.from_int(n, k), k).to_int() for n in range(2**k)}
        assert images == set(range(2**k))


@pytest.mark.parametrize("spec", [T3, T5])
def test_verify_solenoidal(spec):
    ev = verify_solenoidal(spec, 24, 2000, seed=0)
    assert ev.passed and ev.trials == 2000
    bad = verify_solenoidal(spec, 24, 200, seed=0, corrupt=True)
    assert bad.failures == 200 and not bad.passed


def test_solenoidal_equal_pair():
    for x in (0, 1, -7, 2**40 + 3):
        assert phi_inverse_int(T3, x, 24) == phi_inverse_int(T3, x, 24)


@pytest.mark.parametrize("spec", [T3, T5])
def test_verify_conjugacy(spec):
    ev = verify_conjugacy(spec, 1000, 24, seed=1)
    assert ev.passed and ev.to_dict()["failures"] == 0
    zero = Dyadic.from_int(0, 50)
    assert phi_inverse(spec, apply_map_2adic(spec, zero), 23) == shift_2adic(phi_inverse(spec, zero, 24))
