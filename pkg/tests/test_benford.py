import math
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hailstone import benford as bf
from hailstone.maps import T3, T5
from hailstone.stochastic import stream

GOLDEN_MEAN_B3 = 0.066508  # calibration run: B=3, N=40, X=2^40, 10^4 seeds, seed 0
GOLDEN_KM_3_10 = 0.103256  # g=3, k=10, seeds <= 10^6


def lattice_discrepancy(k, g=3, base=10, s_max=400):
    """Discrepancy of the law of sum_i (log_B g - e_i log_B 2) - k log_B(g/4)
    mod 1 with e_i i.i.d. geometric(1/2): the small-correction limit of w_k."""
    lb2 = math.log(2) / math.log(base)
    atoms = {}
    for s in range(k, s_max):
        y = ((2 * k - s) * lb2) % 1.0
        atoms[y] = atoms.get(y, 0.0) + comb(s - 1, k - 1) / 2**s
    cum = sup = inf = 0.0
    for y in sorted(atoms):
        inf = min(inf, cum - y)
        cum += atoms[y]
        sup = max(sup, cum - y)
    return sup - inf


@pytest.mark.parametrize("n,base,m", [(4616, 10, 4.616), (1, 7, 1.0), (27, 2, 1.6875), (10**50, 10, 1.0)])
def test_mantissa_examples(n, base, m):
    assert bf.mantissa(n, base) == pytest.approx(m, abs=1e-12)


@given(st.integers(1, 10**60), st.sampled_from([2, 3, 10]))
def test_mantissa_range_and_scaling(n, base):
    m = bf.mantissa(n, base)
    assert 1 <= m < base
    assert bf.mantissa(n * base, base) == pytest.approx(m, rel=1e-12)


def test_mantissa_real_base():
    assert bf.mantissa(100, math.e) == pytest.approx(100 / math.e**4)


def test_discrepancy_equally_spaced():
    for k in (1, 8, 13):
        rep = bf.discrepancy([Fraction(j, k) for j in range(k)])
        assert rep.discrepancy == Fraction(1, k)
    assert bf.discrepancy([j / 8 for j in range(8)]).discrepancy == pytest.approx(1 / 8, abs=1e-15)


def test_discrepancy_constant_sample():
    assert bf.discrepancy([0.5] * 10).discrepancy == 1
    assert bf.discrepancy([Fraction(1, 2)] * 3).discrepancy == 1


def test_discrepancy_uniform_sample():
    u = stream(1, "benford", 77).random(10**4)
    assert bf.discrepancy(u).discrepancy <= 0.03


@given(st.lists(st.fractions(0, 5, max_denominator=50), min_size=1, max_size=30), st.integers(-3, 3))
def test_discrepancy_properties(vals, shift):
    rep = bf.discrepancy(vals)
    k = len(vals)
    assert Fraction(1, k) <= rep.discrepancy <= 1
    assert bf.discrepancy([v + shift for v in vals]).discrepancy == rep.discrepancy
    assert float(rep.discrepancy) == pytest.approx(bf.discrepancy([float(v) for v in vals]).discrepancy, abs=1e-12)


def test_weyl_decrease():
    vals = [bf.log_base(3 * 2**j, 10) for j in range(1, 1001)]
    d = [bf.discrepancy(vals[:m]).discrepancy for m in (10, 100, 1000)]
    assert d[0] > d[1] > d[2]


def test_base_invariance():
    xs = [7 * 3**j + 1 for j in range(200)]
    for base, direct in ((10, math.log10), (2, math.log2)):
        a = bf.discrepancy([bf.log_base(x, base) for x in xs])
        b = bf.discrepancy([direct(x) for x in xs])
        assert abs(a.discrepancy - b.discrepancy) < 1e-12


def test_bound_value():
    assert bf.discrepancy_bound(40) == pytest.approx(2 * 40 ** (-1 / 36))
    assert 1.80 < bf.discrepancy_bound(40) < 1.81


def test_scan_base_10_no_violations():
    scan = bf.benford_scan(T3, 10, 40, 2**40, 2000, seed=0)
    assert scan.violation_fraction == 0
    assert len(scan.rows) == 2000


def test_scan_short_orbits_flagged():
    scan = bf.benford_scan(T3, 10, 40, 2**40, 10, seed=0)
    logs, short = bf.orbit_log_sample(T3, 8, 40, 10)
    assert short and len(logs) == 3
    assert not any(r.short for r in scan.rows)


def test_scan_golden_b3():
    scan = bf.benford_scan(T3, 3, 40, 2**40, 500, seed=0)
    assert scan.mean_discrepancy == pytest.approx(GOLDEN_MEAN_B3, abs=1e-4)


def test_scan_requires_range():
    with pytest.raises(ValueError):
        bf.benford_scan(T3, 10, 40, 2**20, 10, seed=0)


def test_km_k0_point_mass():
    assert bf.km_shifted_distribution(3, 0, 1000).discrepancy == 1


def test_km_matches_lattice_law():
    rep = bf.km_shifted_distribution(3, 10, 10**6)
    assert rep.discrepancy == pytest.approx(GOLDEN_KM_3_10, abs=1e-6)
    assert abs(rep.discrepancy - lattice_discrepancy(10)) < 0.005
    # the lattice clusters spread out as k grows
    assert lattice_discrepancy(40) < lattice_discrepancy(10)


def test_km_g5():
    rep = bf.km_shifted_distribution(5, 6, 10**5)
    assert abs(rep.discrepancy - lattice_discrepancy(6, g=5)) < 0.01
