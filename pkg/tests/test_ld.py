import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import optimize

from hailstone.ld import (MGF, SolverError, all_constants, closed_form_constants, find_root,
                          golden_section_min, mgf_eval, rate_function, signed_bp_rate,
                          solve_first_birth, solve_gamma, solve_nonzero_root, solve_variational)

RRW3, BP3, RRW5, BP5 = MGF.rrw(3), MGF.bp(3), MGF.rrw(5), MGF.bp(5)


# -- scipy oracles: brute-force Legendre transforms -------------------------

def oracle_rate(mgf, a, theta_max=50.0):
    logm = lambda t: math.log(sum(w * math.exp(t * s) for w, s in mgf.atoms))
    res = optimize.minimize_scalar(lambda t: -(t * a - logm(t)), bounds=(-50.0, theta_max),
                                   method="bounded", options={"xatol": 1e-13})
    return -res.fun


def oracle_gamma(mgf, a_hi):
    a = optimize.brentq(lambda a: oracle_rate(mgf, a) - a, 1e-6, a_hi, xtol=1e-15)
    return 1 / a


def oracle_beta(mgf):
    f = lambda a: -oracle_rate(mgf, a, theta_max=0.0)
    return optimize.brentq(f, 1e-6, mgf.mean, xtol=1e-16)


# -- basic functions ---------------------------------------------------------

def test_mgf_values():
    assert mgf_eval(RRW3, 0) == pytest.approx(1, abs=1e-15)
    assert abs(mgf_eval(RRW3, -1) - 1) < 1e-14
    assert mgf_eval(BP3, 0) == pytest.approx(4 / 3, abs=1e-15)


@given(st.floats(-8, 8))
def test_duality_identity(theta):
    for g in (3, 5):
        assert MGF.bp(g)(theta) == pytest.approx(MGF.rrw(g)(theta + 1), rel=1e-12)


def test_rate_at_mean():
    # descent steps have mean (1/2)ln(4/3); the log-value walk has the negated mean
    assert RRW3.mean == pytest.approx(0.5 * math.log(4 / 3))
    r = rate_function(RRW3.reflected(), 0.5 * math.log(3 / 4))
    assert abs(r.value) < 1e-14 and abs(r.theta) < 1e-10


@given(st.floats(-0.35, 0.65))
def test_rate_matches_oracle(a):
    assert rate_function(RRW3, a).value == pytest.approx(oracle_rate(RRW3, a), abs=1e-9)


@given(st.lists(st.floats(-0.39, 0.68), min_size=2, max_size=2))
def test_rate_convex(pair):
    a, b = pair
    m = (a + b) / 2
    g = lambda x: rate_function(RRW3, x).value
    assert g(m) <= (g(a) + g(b)) / 2 + 1e-12


def test_rate_outside_hull():
    assert rate_function(RRW3, 1.0).value == math.inf
    edge = rate_function(RRW3, math.log(2))
    assert edge.boundary and edge.value == pytest.approx(math.log(2))


def test_gbar_5_shape():
    lo, hi = math.log(2 / 5), math.log(64 / 5) / 6
    assert BP5.mean == pytest.approx(hi)
    xs = np.linspace(lo + 1e-3, hi - 1e-3, 40)
    vals = [signed_bp_rate(BP5, x).value for x in xs]
    assert all(u < v for u, v in zip(vals, vals[1:]))
    for x in (hi + 1e-3, 0.5, 0.69):
        assert signed_bp_rate(BP5, x).value == pytest.approx(math.log(6 / 5), abs=1e-14)


def test_find_root_and_golden():
    assert find_root(lambda x: x * x - 2, 0, 2) == pytest.approx(math.sqrt(2), abs=1e-14)
    assert find_root(math.cos, 1, 2, df=lambda x: -math.sin(x)) == pytest.approx(math.pi / 2, abs=1e-13)
    assert golden_section_min(lambda x: (x - 0.3) ** 2, -1, 1) == pytest.approx(0.3, abs=1e-9)
    with pytest.raises(SolverError):
        find_root(lambda x: x * x + 1, -1, 1)


# -- constants against the oracles -------------------------------------------

def test_gamma_rrw():
    g = solve_gamma(RRW3)
    assert g == pytest.approx(41.677647, abs=1e-4)
    assert g == pytest.approx(oracle_gamma(RRW3, RRW3.mean), rel=1e-8)


def test_gamma_single_atom():
    assert solve_gamma(MGF.point(math.log(2))) == pytest.approx(1 / math.log(2))


def test_beta_values():
    b3, b5 = solve_first_birth(BP3), solve_first_birth(BP5)
    assert b3 == pytest.approx(0.02399, abs=1e-4)
    assert b3 == pytest.approx(oracle_beta(BP3), rel=1e-8)
    assert b5 == pytest.approx(0.01179816, abs=1e-6)
    assert b5 == pytest.approx(oracle_beta(BP5), rel=1e-8)
    assert 1 / b3 == pytest.approx(solve_gamma(RRW3), rel=1e-3)


def test_nonzero_roots():
    t5 = solve_nonzero_root(RRW5)
    assert t5 == pytest.approx(0.3490813, abs=1e-6)
    assert t5 == pytest.approx(optimize.brentq(lambda t: 0.5 * (2**t + 0.4**t) - 1, 0.1, 1, xtol=1e-15), abs=1e-13)
    assert solve_nonzero_root(RRW3) == pytest.approx(-1, abs=1e-13)
    assert 1 - 1 / t5 == pytest.approx(-1.86466, abs=1e-4)
    with pytest.raises(SolverError):
        solve_nonzero_root(MGF.rrw(5, flipped=True))


def test_variational_5():
    eta_rrw = 1 - solve_variational(RRW5, "min_g_over_a").value
    assert 0.6500 <= eta_rrw <= 0.6512
    res = optimize.minimize_scalar(lambda a: oracle_rate(RRW5, a) / a, bounds=(0.01, 0.69),
                                   method="bounded", options={"xatol": 1e-12})
    assert eta_rrw == pytest.approx(1 - res.fun, abs=1e-8)
    bp = solve_variational(BP5, "max_gbar_over_a")
    assert bp.value == pytest.approx(0.650919, abs=1e-3)
    res = optimize.minimize_scalar(lambda a: oracle_rate(BP5, a, 0.0) / a, bounds=(1e-3, BP5.mean),
                                   method="bounded", options={"xatol": 1e-12})
    assert bp.value == pytest.approx(-res.fun, abs=1e-8)
    assert 1 / bp.a_star == pytest.approx(9.1979837, abs=1e-6)


def test_rho_rrw_exact():
    assert abs(0.5 * (2**-1 + (2 / 3) ** -1) - 1) < 1e-14
    rho = solve_variational(RRW3.reflected(), "max_a_over_g")
    assert 1 + rho.value == pytest.approx(2, abs=1e-8)


def test_closed_forms():
    c = closed_form_constants()
    assert c["mean_stopping_3"].value == pytest.approx(6.95212, abs=1e-5)
    assert c["mean_stopping_3_accelerated"].value == pytest.approx(3.476059, abs=1e-5)
    assert c["lower_bound_3"].value == pytest.approx(6.14316, abs=1e-5)
    assert c["lower_bound_5"].value == pytest.approx(4.79253, abs=1e-5)


def test_all_constants_fast():
    import time
    t = time.perf_counter()
    consts = all_constants()
    assert time.perf_counter() - t < 1.0
    assert consts["gamma_rrw"].value == pytest.approx(41.677647, abs=1e-4)
    assert consts["gamma_5"].value == pytest.approx(1 / consts["beta_bp_5"].value, rel=1e-9)
