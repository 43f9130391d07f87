"""Command-line entry point.

Exit codes: 0 success, 1 a check or comparison failed, 2 bad usage or input.
Rates are printed in nats and bits with 12 significant digits.
"""

import argparse
import json
import math
import sys

import numpy as np

from .channel import ChannelConfig, FeedbackCov
from .classic import fixed_point_map, no_feedback_region, ozarow_region, rho_star, rho_star_residual
from .errors import FbmacError
from .families import RegionName, region_generator
from .geometry import (
    DEFAULT_DIRECTIONS,
    approx_subset,
    read_frontier_csv,
    union_frontier,
    write_frontier_csv,
    write_frontiers_svg,
)
from .scheme import SchemeParams, power_usage, rate_bounds
from .search import SearchConfig, optimize
from .simulate import analytic_joint_cov, mc_sample, mutual_information
from .verify import check_ids, run_all, run_verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
_LN2 = math.log(2.0)


class UsageError(Exception):
    pass


def fmt(x):
    return f"{x:.12g}"


def _rate_row(label, nats):
    return f"{label}\t{fmt(nats)}\t{fmt(nats / _LN2)}"


def _triple_rows(t):
    return [
        "quantity\tnats\tbits",
        _rate_row("r1_max", t.r1_max),
        _rate_row("r2_max", t.r2_max),
        _rate_row("rsum_max", t.rsum_max),
    ]


def _load_cfg(path):
    if path is None:
        return ChannelConfig(1.0, 1.0, 1.0, FeedbackCov(1.0, 1.0, 0.0))
    try:
        with open(path) as fh:
            return ChannelConfig.from_json(fh.read())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc


def _weights(text):
    try:
        parts = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad weights {text!r}") from exc
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("weights must be two numbers, e.g. 1,1")
    return parts


def cmd_region(args, out):
    cfg = _load_cfg(args.config)
    gen = region_generator(args.model, cfg, eta=args.eta)
    fr = union_frontier(gen, args.directions, label=args.model)
    write_frontier_csv(fr, args.out)
    if args.svg:
        frontiers = [fr]
        if args.model != RegionName.NO_FB.value:
            frontiers.append(union_frontier(region_generator("no-fb", cfg), args.directions, "no-fb"))
        write_frontiers_svg(frontiers, args.svg, title=args.model)
    print(f"points\t{len(fr.points)}", file=out)
    print("direction_deg\tr1_nats\tr2_nats\tr1_bits\tr2_bits", file=out)
    for d, (r1, r2) in zip(fr.directions, fr.points):
        print(f"{fmt(d)}\t{fmt(r1)}\t{fmt(r2)}\t{fmt(r1 / _LN2)}\t{fmt(r2 / _LN2)}", file=out)
    return EXIT_OK


def cmd_rho_star(args, out):
    cfg = _load_cfg(args.config)
    rs = rho_star(cfg)
    print(f"rho_star\t{fmt(rs)}", file=out)
    print(f"residual\t{fmt(rho_star_residual(cfg, rs))}", file=out)
    print(f"fixed_point_error\t{fmt(abs(fixed_point_map(cfg, rs) - rs))}", file=out)
    print("quantity\tnats\tbits", file=out)
    print(_rate_row("ozarow_sum_rate", ozarow_region(cfg, rs).sum_rate), file=out)
    print(_rate_row("no_fb_sum_rate", no_feedback_region(cfg).sum_rate), file=out)
    return EXIT_OK


def cmd_search(args, out):
    cfg = _load_cfg(args.config)
    sc = SearchConfig(args.eta, args.weights, args.budget, args.seed, args.restarts)
    res = optimize(cfg, sc)
    print(f"evaluations\t{res.evaluations}", file=out)
    print("quantity\tnats\tbits", file=out)
    print(_rate_row("objective", res.objective), file=out)
    for line in _triple_rows(rate_bounds(res.best, cfg))[1:]:
        print(line, file=out)
    use = power_usage(res.best, cfg)
    print(f"power\t{fmt(use.p1_used)}\t{fmt(use.p2_used)}", file=out)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(res.best.to_dict(), fh, indent=2)
    return EXIT_OK


def cmd_simulate(args, out):
    cfg = _load_cfg(args.config)
    try:
        with open(args.params) as fh:
            params = SchemeParams.from_dict(json.load(fh))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read params {args.params}: {exc}") from exc
    rep = mc_sample(params, cfg, args.n, args.seed, partitions=args.partitions)
    jc = analytic_joint_cov(params, cfg)
    z = np.abs(rep.empirical_cov - jc.cov) / np.where(rep.std_errors > 0, rep.std_errors, np.inf)
    print(f"rng\t{rep.rng}\tseed\t{rep.seed}\tn\t{rep.n_samples}\tbackend\t{rep.backend}", file=out)
    print(f"max_z_score\t{fmt(float(np.max(z)))}", file=out)
    print(f"share_within_5_se\t{fmt(float(np.mean(z <= 5.0)))}", file=out)
    for nu in (0, 1):
        row = "\t".join(fmt(v) for v in rep.per_symbol_power[nu])
        print(f"power_tx{nu + 1}\t{row}", file=out)
    for line in _triple_rows(mutual_information(jc, params.eta)):
        print(line, file=out)
    return EXIT_OK


def cmd_verify(args, out):
    outcomes = run_all() if args.all or not args.check else [run_verify(c) for c in args.check]
    for o in outcomes:
        print(o.line(), file=out)
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_FAIL


def cmd_compare(args, out):
    try:
        a = read_frontier_csv(args.a)
        b = read_frontier_csv(args.b)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read frontier: {exc}") from exc
    ok, worst = approx_subset(a, b, args.tol)
    print(f"subset\t{str(ok).lower()}", file=out)
    print(_rate_row("max_violation", worst), file=out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="fbmac", description="Two-user Gaussian MAC feedback toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("region", help="sample a rate region frontier")
    r.add_argument("--model", required=True, choices=[m.value for m in RegionName])
    r.add_argument("--config")
    r.add_argument("--out", required=True)
    r.add_argument("--svg")
    r.add_argument("--eta", type=int, default=4)
    r.add_argument("--directions", type=int, default=DEFAULT_DIRECTIONS)
    r.set_defaults(func=cmd_region)

    s = sub.add_parser("rho-star", help="Ozarow correlation and sum rate")
    s.add_argument("--config")
    s.set_defaults(func=cmd_rho_star)

    s = sub.add_parser("search", help="optimize scheme parameters")
    s.add_argument("--eta", type=int, required=True)
    s.add_argument("--weights", type=_weights, default=(1.0, 1.0))
    s.add_argument("--budget", type=int, default=2000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--restarts", type=int, default=4)
    s.add_argument("--config")
    s.add_argument("--out", help="write the best parameters as JSON")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("simulate", help="Monte-Carlo check against the exact covariance")
    s.add_argument("--params", required=True)
    s.add_argument("--n", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--partitions", type=int, default=4)
    s.add_argument("--config")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("verify", help="run named checks")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true")
    g.add_argument("--check", action="append", choices=check_ids())
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("compare", help="test whether frontier A lies inside frontier B")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_compare)
    return p


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, FbmacError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
