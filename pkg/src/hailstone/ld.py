"""Large-deviations engine for the random-walk and branching models.

An ``MGF`` is a finite list of atoms (weight, s) with M(theta) = sum w*exp(theta*s).
For the walk models s is the per-step *descent* in log scale, e.g. the
3x+1 repeated random walk has atoms (1/2, ln 2) and (1/2, ln(2/3)), so
M(theta) = (2^theta + (2/3)^theta)/2.  Rate functions are Legendre
transforms of log M, computed by solving (log M)'(theta) = a.

Root finding and the 1-D optimiser are written out here (bracketing,
safeguarded Newton, golden section) rather than borrowed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

LN2 = math.log(2)


class SolverError(RuntimeError):
    """No admissible root or optimum inside the bracket."""


# -- scalar solvers ---------------------------------------------------------

def find_root(f, lo, hi, df=None, xtol=1e-14, maxiter=200):
    """Root of ``f`` on [lo, hi] where f(lo) and f(hi) differ in sign.

    Newton steps from the current best point are used when ``df`` is given
    and the step stays inside the shrinking bracket; otherwise bisect.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise SolverError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0:
            return x
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
        else:
            hi = x
        if hi - lo <= xtol * max(1.0, abs(x)):
            break
        step = None
        if df is not None:
            d = df(x)
            if d != 0 and math.isfinite(d):
                step = x - fx / d
        if step is not None and lo < step < hi:
            # stop once Newton no longer moves the iterate
            if abs(step - x) <= xtol * max(1.0, abs(x)):
                return step
            x = step
        else:
            x = 0.5 * (lo + hi)
    return x


INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section_min(f, lo, hi, xtol=1e-12, maxiter=400):
    """Minimiser of a unimodal ``f`` on [lo, hi]."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if b - a <= xtol * max(1.0, abs(a)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


# -- moment generating functions -------------------------------------------

@dataclass(frozen=True)
class MGF:
    atoms: tuple[tuple[float, float], ...]
    kind: str = "rrw"

    def __post_init__(self):
        if self.kind not in ("rrw", "bp"):
            raise ValueError("kind must be 'rrw' or 'bp'")
        if not self.atoms or any(w <= 0 for w, _ in self.atoms):
            raise ValueError("atoms need positive weights")
        if self.kind == "rrw" and abs(sum(w for w, _ in self.atoms) - 1) > 1e-12:
            raise ValueError("random-walk weights must sum to 1")

    @classmethod
    def rrw(cls, g=3, flipped=False):
        """Repeated random walk for the gx+1 map: (2^theta + (2/g)^theta)/2.

        ``flipped=True`` gives (2^theta + (g/2)^theta)/2 instead, the other
        way the 5x+1 walk MGF gets written; it has no nonzero root.
        """
        odd = math.log(g / 2) if flipped else math.log(2 / g)
        return cls(((0.5, LN2), (0.5, odd)), "rrw")

    @classmethod
    def bp(cls, g=3):
        """Branching process: 2^theta + (1/g)(2/g)^theta."""
        return cls(((1.0, LN2), (1.0 / g, math.log(2 / g))), "bp")

    @classmethod
    def point(cls, s):
        return cls(((1.0, s),), "rrw")

    def reflected(self) -> "MGF":
        """MGF of the negated step (ascent instead of descent)."""
        return MGF(tuple((w, -s) for w, s in self.atoms), self.kind)

    @property
    def s_min(self):
        return min(s for _, s in self.atoms)

    @property
    def s_max(self):
        return max(s for _, s in self.atoms)

    def _exponents(self, theta):
        return [theta * s + math.log(w) for w, s in self.atoms]

    def log(self, theta) -> float:
        e = self._exponents(theta)
        m = max(e)
        return m + math.log(sum(math.exp(x - m) for x in e))

    def __call__(self, theta) -> float:
        return math.exp(self.log(theta))

    def _tilted(self, theta):
        e = self._exponents(theta)
        m = max(e)
        p = [math.exp(x - m) for x in e]
        z = sum(p)
        return [q / z for q in p]

    def dlog(self, theta) -> float:
        """(log M)'(theta), the mean step under the tilted law."""
        return sum(p * s for p, (_, s) in zip(self._tilted(theta), self.atoms))

    def d2log(self, theta) -> float:
        p = self._tilted(theta)
        m1 = sum(q * s for q, (_, s) in zip(p, self.atoms))
        return sum(q * (s - m1) ** 2 for q, (_, s) in zip(p, self.atoms))

    @property
    def mean(self) -> float:
        return self.dlog(0.0)


def mgf_eval(mgf: MGF, theta: float) -> float:
    return mgf(theta)


@dataclass(frozen=True)
class RateValue:
    value: float
    theta: float
    boundary: bool = False


def tilt_for(mgf: MGF, a: float) -> float:
    """theta with (log M)'(theta) = a; a must lie strictly inside (s_min, s_max)."""
    if not mgf.s_min < a < mgf.s_max:
        raise SolverError(f"a={a} outside ({mgf.s_min}, {mgf.s_max})")
    f = lambda t: mgf.dlog(t) - a
    lo, hi = -1.0, 1.0
    while f(lo) > 0:
        lo *= 2
        if lo < -1e6:
            raise SolverError("could not bracket the tilt")
    while f(hi) < 0:
        hi *= 2
        if hi > 1e6:
            raise SolverError("could not bracket the tilt")
    return find_root(f, lo, hi, df=mgf.d2log)


def rate_function(mgf: MGF, a: float, theta_max: float = math.inf) -> RateValue:
    """sup over theta <= theta_max of (theta*a - log M(theta)).

    For a outside the open support hull the supremum is +inf (or a finite
    boundary value at the hull endpoints); those cases come back with
    ``boundary=True``.
    """
    if theta_max < math.inf and a >= mgf.dlog(theta_max):
        # objective increasing all the way up to the constraint
        return RateValue(theta_max * a - mgf.log(theta_max), theta_max, False)
    lo, hi = mgf.s_min, mgf.s_max
    if a <= lo or a >= hi:
        theta = -math.inf if a <= lo else math.inf
        if a == lo or a == hi:
            w = sum(w for w, s in mgf.atoms if s == a)
            return RateValue(-math.log(w), theta, True)
        return RateValue(math.inf, theta, True)
    theta = tilt_for(mgf, a)
    return RateValue(theta * a - mgf.log(theta), theta, False)


def signed_bp_rate(mgf: MGF, a: float) -> RateValue:
    """gbar(a) = -sup over theta <= 0 of (theta*a - log M(theta))."""
    r = rate_function(mgf, a, theta_max=0.0)
    return RateValue(-r.value, r.theta, r.boundary)


# -- the constant-producing problems ---------------------------------------

def solve_nonzero_root(mgf: MGF, xtol=1e-15) -> float:
    """The root theta != 0 of M(theta) = 1 (requires M(0) = 1)."""
    if abs(mgf.log(0.0)) > 1e-12:
        raise SolverError("M(0) must equal 1")
    if mgf.s_min >= 0 or mgf.s_max <= 0:
        raise SolverError("M is monotone, so theta = 0 is its only root")
    mu = mgf.mean
    if mu == 0:
        raise SolverError("zero mean: theta = 0 is a double root")
    # log M is convex, vanishes at 0 and dips below 0 on the side opposite
    # to the sign of the mean; the other root sits past the minimiser.
    tmin = tilt_for(mgf, 0.0)
    far = -1.0 if mu > 0 else 1.0
    while mgf.log(tmin + far) < 0:
        far *= 2
        if abs(far) > 1e6:
            raise SolverError("could not bracket the nonzero root")
    lo, hi = sorted((tmin, tmin + far))
    return find_root(mgf.log, lo, hi, df=mgf.dlog, xtol=xtol)


def _min_g_over_a_point(mgf):
    """a* minimising g(a)/a for a walk with negative mean descent."""
    theta = solve_nonzero_root(mgf)
    return mgf.dlog(theta)


def solve_gamma(mgf: MGF) -> float:
    """gamma > 1/|mean| solving gamma * g(1/gamma) = 1.

    Written in a = 1/gamma this is g(a) = a on (0, a_hi), with a_hi the
    mean descent (positive drift towards 1) or, for an upward-drifting
    walk, the minimiser of g(a)/a. h(a) = g(a) - a is decreasing there.
    A single atom (deterministic descent s per step) gives 1/s.
    """
    if mgf.kind != "rrw":
        raise SolverError("solve_gamma needs a random-walk MGF")
    if mgf.s_min == mgf.s_max:
        if mgf.s_min <= 0:
            raise SolverError("a non-descending deterministic walk never stops")
        return 1.0 / mgf.s_min
    mu = mgf.mean
    a_hi = mu if mu > 0 else _min_g_over_a_point(mgf)
    if a_hi <= 0 or mgf.s_min >= 0:
        raise SolverError("no admissible bracket for gamma")
    h = lambda a: rate_function(mgf, a).value - a
    dh = lambda a: tilt_for(mgf, a) - 1.0
    lo = a_hi * 1e-9
    if h(lo) <= 0 or h(a_hi) >= 0:
        raise SolverError("no sign change for gamma*g(1/gamma) = 1")
    a = find_root(h, lo, a_hi, df=dh, xtol=1e-15)
    return 1.0 / a


def solve_first_birth(mgf: MGF) -> float:
    """Positive root beta of gbar(beta) = 0 for a branching-process MGF."""
    if mgf.kind != "bp":
        raise SolverError("solve_first_birth needs a branching-process MGF")
    a_hi = mgf.mean  # where the unconstrained tilt crosses 0
    f = lambda a: signed_bp_rate(mgf, a).value
    df = lambda a: -tilt_for(mgf, min(a, a_hi * (1 - 1e-15)))
    lo = a_hi * 1e-9
    if f(lo) >= 0 or f(a_hi) <= 0:
        raise SolverError("no sign change for the first-birth equation")
    return find_root(f, lo, a_hi, df=df, xtol=1e-16)


@dataclass(frozen=True)
class VariationalResult:
    a_star: float
    value: float
    theta: float
    at_boundary: bool


MODES = ("min_g_over_a", "max_a_over_g", "max_gbar_over_a")


def _objective(mgf, mode):
    if mode == "min_g_over_a":
        return lambda a: rate_function(mgf, a).value / a
    if mode == "max_a_over_g":
        return lambda a: -a / rate_function(mgf, a).value
    if mode == "max_gbar_over_a":
        return lambda a: -signed_bp_rate(mgf, a).value / a
    raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")


def default_interval(mgf: MGF, mode: str):
    eps = 1e-9
    if mode == "max_gbar_over_a":
        return (eps, mgf.mean)
    if mode == "max_a_over_g":
        lo = max(mgf.mean, 0.0)
        return (lo + eps * max(1.0, abs(lo)), mgf.s_max * (1 - eps))
    return (eps, mgf.s_max * (1 - eps))


def solve_variational(mgf: MGF, mode: str, interval=None, xtol=1e-12) -> VariationalResult:
    """Optimise g(a)/a, a/g(a) or gbar(a)/a over ``interval``.

    Golden section locates the optimum; an interior optimum is then
    polished with Newton on the stationarity condition, which for all
    three objectives reads log M(theta(a)) = 0.
    """
    lo, hi = default_interval(mgf, mode) if interval is None else interval
    obj = _objective(mgf, mode)
    a = golden_section_min(obj, lo, hi, xtol=1e-10)
    width = hi - lo
    at_boundary = a - lo < 1e-7 * width or hi - a < 1e-7 * width
    if not at_boundary:
        stat = lambda x: mgf.log(tilt_for(mgf, x))
        dstat = lambda x: x / mgf.d2log(tilt_for(mgf, x))
        step = 1e-6 * width
        try:
            a = find_root(stat, max(lo, a - step), min(hi, a + step), df=dstat, xtol=xtol)
        except SolverError:
            pass  # keep the golden-section estimate
    value = obj(a)
    if mode != "min_g_over_a":
        value = -value
    return VariationalResult(a, value, tilt_for(mgf, a), at_boundary)


# -- constants --------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    value: float
    formula: str
    reference: str


def closed_form_constants() -> dict[str, Constant]:
    ln2, ln3, ln5 = LN2, math.log(3), math.log(5)
    x1 = 1 / (0.75 * ln3 - ln2)
    return {
        "mean_stopping_3": Constant(1 / abs(0.5 * math.log(3 / 4)), "1/|(1/2)ln(3/4)|",
                                    "predicted sigma_inf(n)/ln n for typical 3x+1 seeds"),
        "mean_stopping_3_accelerated": Constant(1 / abs(math.log(3 / 4)), "1/|ln(3/4)|",
                                                "same for the accelerated map U"),
        "mean_growth_5": Constant(1 / (0.5 * math.log(5 / 4)), "1/((1/2)ln(5/4))",
                                  "time scale of 5x+1 log-growth"),
        "lower_bound_3": Constant(29 / (29 * ln2 - 14 * ln3), "29/(29 ln2 - 14 ln3)",
                                  "proven lower bound on sigma_inf(n)/ln n for infinitely many 3x+1 seeds"),
        "lower_bound_5": Constant(2 / ln2 + math.log(5 / 2) / ln2**2, "2/ln2 + ln(5/2)/(ln2)^2",
                                  "proven lower bound on sigma_inf(n)/ln n for infinitely many 5x+1 seeds"),
        "drift_3": Constant(0.5 * math.log(3 / 4), "(1/2)ln(3/4)", "3x+1 walk step mean"),
        "step_sd_3": Constant(0.5 * ln3, "(1/2)ln 3", "3x+1 walk step standard deviation"),
        "drift_5": Constant(0.5 * math.log(5 / 4), "(1/2)ln(5/4)", "5x+1 walk step mean"),
        "step_sd_5": Constant(0.5 * ln5, "(1/2)ln 5", "5x+1 walk step standard deviation"),
        "overlay_x1": Constant(x1, "1/((3/4)ln3 - ln2)", "peak abscissa of extreme-excursion shape"),
        "overlay_x2": Constant(x1 + 2 / (0.5 * math.log(4 / 3)), "x1 + 2/((1/2)ln(4/3))",
                               "end abscissa of extreme-excursion shape"),
        "log10_2": Constant(math.log10(2), "log10 2", "Benford frequency of leading digit 1 offset"),
    }


def solved_constants() -> dict[str, Constant]:
    rrw3, bp3 = MGF.rrw(3), MGF.bp(3)
    rrw5, bp5 = MGF.rrw(5), MGF.bp(5)
    theta5 = solve_nonzero_root(rrw5)
    theta3 = solve_nonzero_root(rrw3)
    tau = solve_variational(rrw5, "min_g_over_a")
    eta_bp = solve_variational(bp5, "max_gbar_over_a")
    rho3 = solve_variational(rrw3.reflected(), "max_a_over_g")
    beta3, beta5 = solve_first_birth(bp3), solve_first_birth(bp5)
    return {
        "gamma_rrw": Constant(solve_gamma(rrw3), "gamma*g(1/gamma)=1, M=(2^t+(2/3)^t)/2",
                                "predicted extreme sigma_inf(n)/ln n, 3x+1"),
        "beta_bp": Constant(beta3, "gbar(beta)=0, M=2^t+(1/3)(2/3)^t", "first-birth speed, 3x+1 tree model"),
        "inv_beta_bp": Constant(1 / beta3, "1/beta_bp", "dual of gamma_rrw"),
        "gamma_5": Constant(solve_gamma(rrw5), "gamma*g(1/gamma)=1, M=(2^t+(2/5)^t)/2",
                            "predicted extreme sigma_inf(n)/ln n, 5x+1"),
        "beta_bp_5": Constant(beta5, "gbar(beta)=0, M=2^t+(1/5)(2/5)^t", "first-birth speed, 5x+1 tree model"),
        "inv_beta_bp_5": Constant(1 / beta5, "1/beta_bp_5", "dual of gamma_5"),
        "theta_5": Constant(theta5, "nonzero root of (2^t+(2/5)^t)/2=1", "5x+1 walk exponent"),
        "theta_3": Constant(theta3, "nonzero root of (2^t+(2/3)^t)/2=1", "3x+1 walk exponent (-1)"),
        "rho_rrw_3": Constant(1 + rho3.value, "1 + max a/g_asc(a)", "predicted max excursion exponent, 3x+1"),
        "rho_minus_5": Constant(1 - 1 / theta5, "1 - 1/theta_5", "predicted min excursion exponent, 5x+1"),
        "eta_5_rrw": Constant(1 - tau.value, "1 - min g(a)/a", "exceptional-set exponent, 5x+1 walk"),
        "eta_5_bp": Constant(eta_bp.value, "max gbar(a)/a", "exceptional-set exponent, 5x+1 tree model"),
        "five_bp_peak_level": Constant(1 / eta_bp.a_star, "1/a* at the gbar(a)/a optimum",
                                       "typical sigma_inf(n)/ln n of 5x+1 seeds reaching 1"),
    }


def all_constants() -> dict[str, Constant]:
    out = closed_form_constants()
    out.update(solved_constants())
    return out
