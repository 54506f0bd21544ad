"""Command-line entry point: ``hailstone <command> [options]``.

Every output starts with a header (tool version, config echo, seed). The
worker count is left out of the echo because it never changes results.
Exit codes: 0 success, 1 usage error, 2 result truncated by a budget.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from hailstone import __version__
from hailstone.maps import DomainError, MapSpec, Stop, Variant, iterate

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_TRUNCATED = 0, 1, 2
_NOT_ECHOED = {"workers", "output", "format", "func"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Result:
    def __init__(self, columns, rows, summary=None, truncated=False):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.summary = summary or {}
        self.truncated = truncated


def _map_spec(args) -> MapSpec:
    return MapSpec(args.map, variant=Variant(args.variant))


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def _config(args) -> dict:
    return {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}


def emit(args, res: Result, out):
    cfg = _config(args)
    fmt = args.format
    if fmt == "csv":
        out.write(f"# hailstone {__version__}\n")
        out.write(f"# config: {json.dumps(cfg, sort_keys=True)}\n")
        out.write(f"# seed: {args.seed}\n")
        if res.summary:
            out.write(f"# summary: {json.dumps(res.summary, sort_keys=True, default=_jsonable)}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(res.columns)
        w.writerows(res.rows)
        return
    head = {"schema_version": SCHEMA_VERSION, "tool": "hailstone", "version": __version__,
            "config": cfg, "seed": args.seed, "truncated": res.truncated}
    if fmt == "json":
        head.update(summary=res.summary, columns=res.columns, rows=res.rows)
        out.write(json.dumps(head, sort_keys=True, indent=1, default=_jsonable) + "\n")
    else:  # jsonl: header line then one object per row
        head["summary"] = res.summary
        out.write(json.dumps(head, sort_keys=True, default=_jsonable) + "\n")
        for r in res.rows:
            out.write(json.dumps(dict(zip(res.columns, r)), sort_keys=True, default=_jsonable) + "\n")


# -- commands ---------------------------------------------------------------

def cmd_orbit(args):
    spec = _map_spec(args)
    stop = Stop.steps(args.steps) if args.steps is not None else Stop.reach(1)
    orb = iterate(spec, args.n, stop, args.budget)
    rows = []
    for k, v in enumerate(orb.values):
        e = orb.exponent_trace[k] if k < len(orb.exponent_trace) else ""
        rows.append((k, v, v & 1, e))
    return Result(("k", "value", "parity", "exponent"), rows,
                  {"steps": orb.steps, "max": max(orb.values)}, orb.truncated)


def cmd_records(args):
    from hailstone.orbits import scan_records

    rec = scan_records(_map_spec(args), args.stat, args.max, start=args.start,
                       budget=args.budget, workers=args.workers)
    return Result(rec.columns(), rec.rows(), {"records": len(rec.entries),
                                              "truncated_seeds": rec.n_truncated},
                  rec.n_truncated > 0)


def cmd_density(args):
    from hailstone.symdyn import stopping_density

    spec = _map_spec(args)
    rows = []
    for k in range(args.k_min, args.k + 1):
        rep = stopping_density(spec, k, args.lam, args.direction)
        d = rep.density
        rows.append((k, str(rep.lam), rep.direction, str(d), f"{float(d):.12f}",
                     rep.unstopped_count, f"{rep.unstopped_exponent:.6f}"))
    return Result(("k", "lambda", "direction", "density", "density_float", "unstopped",
                   "unstopped_exponent"), rows)


def cmd_structure(args):
    from hailstone.symdyn import verify_structure_range

    reps = verify_structure_range(args.s_max, args.checks)
    rows = [(r.epsilon, r.k, r.s, r.expected, len(r.hits), int(r.passed)) for r in reps]
    return Result(("eps", "k", "s", "expected", "found", "passed"), rows,
                  {"cases": len(reps), "all_passed": all(r.passed for r in reps)})


def cmd_census(args):
    from hailstone.trees import CENSUS_COLUMNS, census_levels

    rows, sums = [], {}
    for row, _ in census_levels(args.g, args.k_max):
        rows.append(row.csv_row())
        sums[row.k] = row.leaf_sum
    return Result(CENSUS_COLUMNS, rows, {"leaf_sums": sums})


def cmd_pi_count(args):
    from hailstone.trees import count_inverse_iterates

    res = count_inverse_iterates(_map_spec(args), args.a, args.x, cutoff=args.cutoff,
                                 node_budget=args.node_budget)
    ratio = math.log(res.count) / math.log(res.x) if res.count > 1 and res.x > 1 else ""
    return Result(("a", "x", "count", "log_ratio", "cutoff", "exact", "nodes"),
                  [(res.a, res.x, res.count, ratio, res.cutoff, int(res.exact), res.nodes_expanded)],
                  truncated=res.budget_exhausted)


def cmd_simulate_walk(args):
    from hailstone import stochastic as st

    model = st.WalkModel.collatz(args.g)
    if args.mode == "first-passage":
        z0 = math.log(args.n0)
        s = st.first_passage_times(model, z0, args.trials, args.seed, args.budget, args.workers)
        ok = s >= 0
        z = st.normalized_stopping(s[ok], z0, model)
        rows = [(i, int(v), f"{zz:.9f}") for i, v, zz in zip(np.flatnonzero(ok), s[ok], z)]
        summary = {"z0": z0, "mean_S_over_z0": float(s[ok].mean() / z0) if ok.any() else None,
                   "ks": st.ks_to_normal(z) if len(z) else None, "unfinished": int((~ok).sum())}
        return Result(("trial", "S", "normalized"), rows, summary, bool((~ok).any()))
    res = st.rrw_trial(model, args.start, args.stop, args.seed, args.budget, args.workers)
    logn = np.log(res.seeds.astype(float))
    rows = []
    for n, s, hi, ln in zip(res.seeds, res.s_inf, res.log_tmax, logn):
        rows.append((int(n), int(s), f"{s / ln:.9f}" if s >= 0 and ln > 0 else "",
                     f"{hi / ln:.9f}" if ln > 0 else ""))
    return Result(("n", "s_inf", "s_over_ln_n", "rho"), rows,
                  {"unfinished": int((res.s_inf < 0).sum())}, bool((res.s_inf < 0).any()))


def cmd_simulate_bp(args):
    from hailstone import stochastic as st

    model = st.BranchModel(args.g, args.j)
    if args.slope:
        median, fits = st.median_inverse_count_slope(model, args.seed, args.fits, args.x_lo,
                                                     args.x_hi, args.margin, args.workers)
        rows = [(i, f"{f.slope:.9f}", f.generations, f.counts[max(f.counts)]) for i, f in enumerate(fits)]
        return Result(("realization", "slope", "generations", "count_at_x_hi"), rows,
                      {"median_slope": median}, any(f.truncated for f in fits))
    reals = st.bp_realizations(model, args.K, args.count, args.seed, workers=args.workers)
    rows = [(r.seed, r.generations, r.counts[-1], f"{st.bp_growth_rate(r):.9f}",
             f"{r.first_birth[-1] / r.generations:.9f}") for r in reals]
    summ = st.growth_rate_summary(reals)
    return Result(("realization", "generations", "N_K", "growth_rate", "first_birth_over_K"), rows,
                  {"mean_growth": summ.mean, "std_growth": summ.std,
                   "target": math.log((args.g + 1) / args.g)},
                  any(r.truncated for r in reals))


def cmd_constants(args):
    from hailstone.ld import all_constants

    consts = all_constants()
    rows = [(k, repr(c.value), c.formula, c.reference) for k, c in consts.items()]
    return Result(("name", "value", "formula", "reference"), rows,
                  {k: c.value for k, c in consts.items()})


def cmd_benford(args):
    from hailstone import benford as bf

    if args.km:
        rep = bf.km_shifted_distribution(args.g, args.k, args.x, args.base)
        return Result(("g", "k", "seeds", "discrepancy", "sup", "inf"),
                      [(args.g, args.k, rep.k, f"{rep.discrepancy:.9f}", f"{rep.sup:.9f}",
                        f"{rep.inf:.9f}")])
    scan = bf.benford_scan(_map_spec(args), args.base, args.N, args.x, args.samples, args.seed)
    rows = [(r.seed, r.n_used, f"{r.discrepancy:.9f}", f"{r.bound:.6f}", int(r.violated), int(r.short))
            for r in scan.rows]
    return Result(("seed", "n_used", "discrepancy", "bound", "violated", "short"), rows,
                  {"mean_discrepancy": scan.mean_discrepancy,
                   "violation_fraction": scan.violation_fraction, "short_seeds": scan.short_seeds})


def cmd_padic(args):
    from hailstone import padic

    spec = _map_spec(args)
    evs = [padic.verify_solenoidal(spec, args.bits, args.trials, args.seed),
           padic.verify_solenoidal(spec, args.bits, args.trials, args.seed, corrupt=True),
           padic.verify_conjugacy(spec, args.trials, args.bits, args.seed)]
    rows = [(e.check, e.map, e.bits, e.trials, e.failures, int(e.passed)) for e in evs]
    return Result(("check", "map", "bits", "trials", "failures", "passed"), rows)


def cmd_figures(args):
    from hailstone.orbits import rho_exceedances, scaled_trajectory, scan_records

    if (args.traj is None) == (args.rho is None):
        raise UsageError("figures needs exactly one of --traj N or --rho MAX")
    spec = _map_spec(args)
    if args.traj is not None:
        tr = scaled_trajectory(spec, args.traj, args.budget)
        rows = [("trajectory", f"{x:.9f}", f"{y:.9f}") for x, y in tr.points]
        for name, pts in sorted(tr.overlays.items()):
            rows += [(f"overlay_{name}", f"{x:.9f}", f"{y:.9f}") for x, y in pts]
        return Result(("series", "x", "y"), rows, truncated=tr.truncated)
    rec = scan_records(spec, "t", args.rho, budget=args.budget, workers=args.workers)
    rows = [(e.n, e.t, f"{e.rho:.6f}") for e in rec.entries]
    exceed = rho_exceedances(spec, args.rho + 1, budget=args.budget, workers=args.workers)
    return Result(("n", "t", "rho"), rows, {"rho_above_2": exceed})


# -- parser -----------------------------------------------------------------

def _common(p, fmt="csv", map_arg=True, budget=None):
    p.add_argument("--seed", type=int, default=0, help="RNG seed (recorded in the header)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json", "jsonl"), default=fmt)
    p.add_argument("-o", "--output", help="write here instead of stdout")
    if map_arg:
        p.add_argument("--map", type=int, choices=(3, 5), default=3)
        p.add_argument("--variant", choices=("C", "T", "U"), default="T")
    if budget is not None:
        p.add_argument("--budget", type=int, default=budget)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hailstone", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"hailstone {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("orbit", help="iterate one seed")
    _common(p, budget=10**5)
    p.add_argument("n", type=int)
    p.add_argument("--steps", type=int, help="stop after this many steps instead of at 1")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("records", help="record seeds of an orbit statistic")
    _common(p, budget=None)
    p.add_argument("--budget", type=int)
    p.add_argument("--stat", choices=("gamma", "ones_ratio", "sigma", "t", "rho"), default="ones_ratio")
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--start", type=int)
    p.set_defaults(func=cmd_records)

    p = sub.add_parser("density", help="exact lambda-stopping densities")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--lam", default="1", help="lambda as an integer or fraction p/q")
    p.add_argument("--direction", choices=("below", "above"))
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("structure", help="verify the exponent-sequence structure")
    _common(p, map_arg=False)
    p.add_argument("--s-max", type=int, default=10)
    p.add_argument("--checks", type=int, default=3)
    p.set_defaults(func=cmd_structure)

    p = sub.add_parser("census", help="pruned-tree census over residue classes")
    _common(p, map_arg=False)
    p.add_argument("--g", type=int, choices=(3, 5), default=3)
    p.add_argument("--k-max", type=int, default=10)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("pi-count", help="count n <= x whose orbit contains a")
    _common(p)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--node-budget", type=int, default=10**7)
    p.set_defaults(func=cmd_pi_count)

    p = sub.add_parser("simulate-walk", help="random walk model of forward iteration")
    _common(p, map_arg=False, budget=10**5)
    p.add_argument("--g", type=int, choices=(3, 5), default=3)
    p.add_argument("--mode", choices=("first-passage", "rrw"), default="first-passage")
    p.add_argument("--n0", type=float, default=1e6, help="start at ln(n0)")
    p.add_argument("--trials", type=int, default=10**4)
    p.add_argument("--start", type=int, default=2)
    p.add_argument("--stop", type=int, default=10**4)
    p.set_defaults(func=cmd_simulate_walk)

    p = sub.add_parser("simulate-bp", help="branching random walk model of the inverse tree")
    _common(p, map_arg=False)
    p.add_argument("--g", type=int, choices=(3, 5), default=3)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--K", type=int, default=40)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--slope", action="store_true", help="fit the inverse-count slope instead")
    p.add_argument("--x-lo", type=float, default=1e2)
    p.add_argument("--x-hi", type=float, default=1e5)
    p.add_argument("--margin", type=float, default=None,
                   help="pruning margin in nats above ln x-hi (default 20 for j=0, 3 otherwise)")
    p.add_argument("--fits", type=int, default=101, help="realizations whose slopes are medianed")
    p.set_defaults(func=cmd_simulate_bp)

    p = sub.add_parser("constants", help="closed-form and solved constants")
    _common(p, fmt="json", map_arg=False)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("benford", help="discrepancy of iterate logarithms")
    _common(p)
    p.add_argument("--base", type=float, default=10)
    p.add_argument("--N", type=int, default=40)
    p.add_argument("--x", type=int, default=2**40)
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--km", action="store_true", help="shifted-variable distribution of U^k instead")
    p.add_argument("--g", type=int, choices=(3, 5), default=3)
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(func=cmd_benford)

    p = sub.add_parser("padic", help="2-adic solenoidal and conjugacy checks")
    _common(p)
    p.add_argument("--bits", type=int, default=24)
    p.add_argument("--trials", type=int, default=10**3)
    p.set_defaults(func=cmd_padic)

    p = sub.add_parser("figures", help="plot data: scaled trajectory or rho records")
    _common(p, budget=10**5)
    p.add_argument("--traj", type=int, metavar="N")
    p.add_argument("--rho", type=int, metavar="MAX")
    p.set_defaults(func=cmd_figures)
    return ap


def _validate(args):
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    budget = getattr(args, "budget", None)
    if budget is not None and budget < 1:
        raise UsageError("--budget must be positive")
    if isinstance(getattr(args, "lam", None), str):
        from fractions import Fraction

        try:
            args.lam = Fraction(args.lam)
        except ValueError:
            raise UsageError(f"bad --lam {args.lam!r}") from None
        args.lam = str(args.lam)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        res = args.func(args)
    except (UsageError, DomainError, ValueError) as exc:
        print(f"hailstone {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w", newline="") as fh:
            emit(args, res, fh)
    else:
        emit(args, res, sys.stdout)
    return EXIT_TRUNCATED if res.truncated else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
