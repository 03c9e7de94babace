"""Command-line front end: ``frobdisc <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from .census import (
    Aggregates,
    CacheError,
    CensusConfig,
    CensusRun,
    InvariantError,
    PrimeCensus,
    _Neumaier,
    _read_cache,
    box_average_demo,
    census_range,
    report_rows,
)
from .constants import DEFAULT_PRIME_CUT, frak_C, frak_C_alt
from .gl2 import count_order_squarefree_factor, count_p1, count_p2, csf_generic, csf_prime_generic
from .modarith import CongruenceTarget, ResourceError
from .sums import default_U, s_of_T_convergence
from .verify import SUITES

log = logging.getLogger("frobdisc")

THREADS_ENV = "FROBDISC_THREADS"


class UsageError(ValueError):
    pass


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v) for v in obj]
    return obj


def _dump(obj, out):
    out.write(json.dumps(_round_floats(obj)) + "\n")


def _target(args):
    try:
        target = CongruenceTarget(args.r, args.h)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not target.gcd_rh_squarefree:
        log.warning("(r,h) not square-free: gcd(%d, %d) has a square factor, all counts are 0", target.canonical_r, target.h)
    return target


def _workers(args):
    env = os.environ.get(THREADS_ENV)
    n = int(env) if env else args.workers
    if n < 1:
        raise UsageError("thread count must be >= 1")
    return n


def _write_report(run: CensusRun, out):
    agg = run.aggregates
    for note in run.notes:
        out.write(f"# {note}\n")
    out.write(f"# target r={run.target.r} h={run.target.h} x={agg.x} constant={_fmt(agg.constant)}\n")
    out.write(f"# A1={_fmt(agg.A1)} predicted_A1={_fmt(agg.predicted_A1)} ratio_A1={_fmt(agg.ratio_A1)}\n")
    out.write(f"# A2={agg.A2} predicted_A2={_fmt(agg.predicted_A2)} ratio_A2={_fmt(agg.ratio_A2)}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["p", "pib", "cumulative_A1", "cumulative_A2", "predicted_A1", "ratio"])
    for row in report_rows(run):
        w.writerow([_fmt(v) for v in row])


def _summary(run: CensusRun):
    agg = run.aggregates
    return {
        "x": agg.x,
        "r": run.target.r,
        "h": run.target.h,
        "primes": agg.n_primes,
        "constant": agg.constant,
        "A1": agg.A1,
        "predicted_A1": agg.predicted_A1,
        "ratio_A1": agg.ratio_A1,
        "A2": agg.A2,
        "predicted_A2": agg.predicted_A2,
        "ratio_A2": agg.ratio_A2,
    }


def cmd_census(args):
    target = _target(args)
    config = CensusConfig(direct_max=args.direct_max, workers=_workers(args), cache_path=args.cache)
    constant = float(frak_C(target, args.prime_cut).value)
    run = census_range(args.x, target, config, constant)
    if args.report:
        with open(args.report, "w") as fh:
            _write_report(run, fh)
        _dump(_summary(run), sys.stdout)
    else:
        _write_report(run, sys.stdout)
    return 0


def cmd_report(args):
    """CSV report rebuilt from an existing census cache."""
    target = _target(args)
    done = _read_cache(args.cache, target)
    if not done:
        raise UsageError(f"{args.cache}: no census records")
    x = args.x or max(done)
    records = [PrimeCensus(p, done[p][0], done[p][1]) for p in sorted(done) if p <= x]
    constant = float(frak_C(target, args.prime_cut).value)
    a1 = _Neumaier()
    for rec in records:
        a1.add(rec.pib / (rec.p * (rec.p - 1)))
    agg = Aggregates(x, a1.value, sum(r.pib for r in records), constant, len(records))
    run = CensusRun(target, records, agg, ["census starts at p = 5; p = 3 is excluded"])
    _write_report(run, sys.stdout)
    return 0


def cmd_constant(args):
    target = _target(args)
    fn = frak_C_alt if args.alt else frak_C
    val = fn(target, args.prime_cut)
    if args.json:
        _dump(val.to_json(with_factors=args.factors), sys.stdout)
    else:
        print(f"C = {float(val.value):.12g} +- {val.tail_bound:.3g} (primes <= {val.prime_cut})")
    return 0


def cmd_gl2(args):
    if args.kind == "p1":
        res = count_p1(args.ell).to_json()
    elif args.kind == "p2":
        res = count_p2(args.ell, args.alpha, args.r).to_json()
    elif args.kind == "order":
        res = count_order_squarefree_factor(args.ell).to_json()
        if not res["agrees"]:
            log.warning("enumeration and closed form disagree for the p+1-a_p factor at ell=%d", args.ell)
    elif args.kind == "csf":
        res = csf_generic(_target(args), args.level, args.prime_cut).to_json()
    else:
        res = csf_prime_generic(args.level, args.prime_cut).to_json()
    _dump(res, sys.stdout)
    return 0


def cmd_sum(args):
    target = _target(args)
    R_list = [int(v) for v in args.R.split(",") if v]
    for R in R_list:
        if default_U(args.T, R) < R * R:
            log.warning("U < R^2 for R=%d", R)
    rows = s_of_T_convergence(args.T, target, R_list, args.prime_cut)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["R", "U", "S_over_T", "predicted", "deviation"])
    for row in rows:
        w.writerow([row.R, row.U, _fmt(row.S_over_T), _fmt(row.predicted), _fmt(row.deviation)])
    return 0


def cmd_box_demo(args):
    target = _target(args)
    avg = box_average_demo(args.A, args.B, args.x, target)
    _dump({"A": args.A, "B": args.B, "x": args.x, "average": f"{avg.numerator}/{avg.denominator}", "value": float(avg)}, sys.stdout)
    return 0


def cmd_verify(args):
    kwargs = {}
    if args.suite in ("deuring", "census") and args.pmax:
        kwargs["pmax"] = args.pmax
    if args.suite == "ct":
        if args.nmax:
            kwargs["nmax"] = args.nmax
        if args.tmax:
            kwargs["tmax"] = args.tmax
    if args.suite in ("constant-identity", "st") and args.prime_cut:
        kwargs["prime_cut"] = args.prime_cut
    failure = SUITES[args.suite](**kwargs)
    if failure:
        print(f"FAIL {args.suite}: {failure}")
        return 1
    print(f"ok {args.suite}")
    return 0


def _add_target(p, h_default=1):
    p.add_argument("--r", type=int, default=0)
    p.add_argument("--h", type=int, default=h_default)


def build_parser():
    ap = argparse.ArgumentParser(prog="frobdisc", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("census", help="curve census over 5 <= p <= x with CSV report")
    p.add_argument("--x", type=int, required=True)
    _add_target(p)
    p.add_argument("--direct-max", type=int, default=499)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache", type=Path)
    p.add_argument("--report", type=Path)
    p.add_argument("--prime-cut", type=int, default=DEFAULT_PRIME_CUT)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("report", help="CSV report from a census cache")
    p.add_argument("--cache", type=Path, required=True)
    p.add_argument("--x", type=int)
    _add_target(p)
    p.add_argument("--prime-cut", type=int, default=DEFAULT_PRIME_CUT)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("constant", help="main constant as a truncated Euler product")
    _add_target(p)
    p.add_argument("--prime-cut", type=int, default=DEFAULT_PRIME_CUT)
    p.add_argument("--alt", action="store_true", help="use the P(r,h) / G(p) form")
    p.add_argument("--json", action="store_true")
    p.add_argument("--factors", action="store_true", help="include per-prime factors in JSON")
    p.set_defaults(func=cmd_constant)

    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--pmax", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--tmax", type=int)
    p.add_argument("--prime-cut", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gl2", help="GL_2 enumeration densities")
    p.add_argument("kind", choices=["p1", "p2", "order", "csf", "csf-prime"])
    p.add_argument("--ell", type=int, default=3)
    p.add_argument("--alpha", type=int, default=1)
    _add_target(p)
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--prime-cut", type=int, default=DEFAULT_PRIME_CUT)
    p.set_defaults(func=cmd_gl2)

    p = sub.add_parser("sum-st", help="S(T) convergence table")
    p.add_argument("--T", type=int, required=True)
    _add_target(p)
    p.add_argument("--R", default="10,30,100")
    p.add_argument("--prime-cut", type=int, default=DEFAULT_PRIME_CUT)
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("box-demo", help="average over a box of curves E(a, b)")
    p.add_argument("--A", type=int, default=5)
    p.add_argument("--B", type=int, default=5)
    p.add_argument("--x", type=int, default=50)
    _add_target(p)
    p.set_defaults(func=cmd_box_demo)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ResourceError, MemoryError, CacheError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InvariantError, AssertionError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
