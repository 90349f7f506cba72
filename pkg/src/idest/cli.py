"""Command-line entry point: ``idest gen | estimate | sweep | selftest``.

Exit codes: 0 success, 1 invalid input or arguments, 2 estimator failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import selftest
from .datasets import KINDS, GeneratorSpec, format_float, generate, load_csv, save_csv
from .errors import EstimationError, IdestError, ValidationError
from .harness import METHODS, estimate_cell, sweep
from .knn import build_neighbor_table


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_reg_flags(p):
    g = p.add_argument_group("reg-mle options")
    g.add_argument("--gamma0", type=float)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--gamma-cap", type=float)
    g.add_argument("--max-iter", type=int)
    g.add_argument("--tol", type=float)
    g.add_argument("--init", choices=["lb_warm_start", "seeded_uniform"])
    g.add_argument("--seed", type=int)
    g.add_argument("--schedule", choices=["capped", "literal"])
    g.add_argument("--update-order", choices=["gauss_seidel", "jacobi"])
    g = p.add_argument_group("baseline options")
    g.add_argument("--k1", type=int, help="lower k for lb-mle averaging / knn-reg regression")
    g.add_argument("--num-radii", type=int)
    g.add_argument("--fit-lo", type=float)
    g.add_argument("--fit-hi", type=float)


_REG_KEYS = {
    "gamma0": "gamma0",
    "epsilon": "epsilon",
    "gamma_cap": "gamma_cap",
    "max_iter": "max_iter",
    "tol": "tol",
    "init": "init",
    "seed": "seed",
    "schedule": "schedule",
    "update_order": "update_order",
}
_CORR_KEYS = {"num_radii": "num_radii", "fit_lo": "fit_lo_quantile", "fit_hi": "fit_hi_quantile"}


def _overrides(args, method):
    def pick(mapping):
        return {dst: getattr(args, src) for src, dst in mapping.items() if getattr(args, src) is not None}

    if method == "reg-mle":
        return pick(_REG_KEYS)
    if method == "corr-dim":
        return pick(_CORR_KEYS)
    if method in ("lb-mle", "knn-reg") and args.k1 is not None:
        return {"k1": args.k1}
    return {}


def build_parser():
    parser = _Parser(prog="idest", description="Intrinsic dimension estimation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample a synthetic manifold to CSV")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--dim", type=int, help="ambient dimension (gaussian, uniform_cube)")
    p.add_argument("--manifold-dim", type=int, help="cube dimension (uniform_cube)")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("estimate", help="estimate the intrinsic dimension of a CSV cloud")
    p.add_argument("file")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--per-point", metavar="OUT.csv")
    p.add_argument("--header", choices=["auto", "yes", "no"], default="auto")
    p.add_argument("--dedup", choices=["error", "drop_duplicates"], default="error")
    _add_reg_flags(p)

    p = sub.add_parser("sweep", help="run several methods over a range of k")
    p.add_argument("file")
    p.add_argument("--methods", required=True, help="comma-separated subset of " + ",".join(METHODS))
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--header", choices=["auto", "yes", "no"], default="auto")
    p.add_argument("--dedup", choices=["error", "drop_duplicates"], default="error")
    p.add_argument("--metadata", metavar="OUT.json", help="write sweep metadata as JSON")
    _add_reg_flags(p)

    sub.add_parser("selftest", help="run the built-in oracle and invariance checks")
    return parser


def _cmd_gen(args):
    spec = GeneratorSpec(
        kind=args.kind,
        n=args.n,
        seed=args.seed,
        noise_sigma=args.noise,
        dim=args.dim,
        manifold_dim=args.manifold_dim,
    )
    save_csv(generate(spec), args.output)
    return 0


def _cmd_estimate(args):
    cloud = load_csv(args.file, args.header)
    if args.method == "corr-dim":
        table = None
    else:
        table = build_neighbor_table(cloud, args.k, args.dedup)
    aggregate, per_point, _ = estimate_cell(table, cloud, args.method, args.k, _overrides(args, args.method))
    print(f"{args.method},{args.k},{format_float(aggregate)}")
    if args.per_point:
        if per_point is None:
            raise ValidationError(f"{args.method} has no per-point estimates")
        with open(args.per_point, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("point_index", "estimate"))
            for src, value in zip(table.source_index, per_point):
                w.writerow((int(src), format_float(value)))
    return 0


def _cmd_sweep(args):
    cloud = load_csv(args.file, args.header)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    configs = {m: _overrides(args, m) for m in methods}
    table = None
    if any(m != "corr-dim" for m in methods) and args.k_max <= cloud.n - 1:
        table = build_neighbor_table(cloud, args.k_max, args.dedup)
    result = sweep(cloud, methods, args.k_min, args.k_max, configs, table=table)
    with open(args.output, "w", newline="") as fh:
        result.write_csv(fh)
    if args.metadata:
        meta = dict(result.metadata, source=args.file)
        with open(args.metadata, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
    return 0


def _cmd_selftest(args):
    ok = True
    for name, passed, detail in selftest.run_all():
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok &= passed
    return 0 if ok else 1


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"idest: error: {exc}", file=sys.stderr)
        return 1
    handler = {"gen": _cmd_gen, "estimate": _cmd_estimate, "sweep": _cmd_sweep, "selftest": _cmd_selftest}
    try:
        return handler[args.command](args)
    except ValidationError as exc:
        print(f"idest: error: {exc}", file=sys.stderr)
        return 1
    except EstimationError as exc:
        print(f"idest: estimation failed: {exc}", file=sys.stderr)
        return 2
    except IdestError as exc:
        print(f"idest: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"idest: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
