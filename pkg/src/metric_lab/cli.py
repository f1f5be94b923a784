"""Command-line interface.

Exit codes: 0 all checks passed, 1 a claimed bound was violated,
2 input/config error, 3 I/O error.  The METRIC_LAB_SEED environment
variable overrides the config-file seed for certify and lipschitz runs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import measure_algebra as ma
from .certify import SweepConfig, run_certification, write_report
from .geometry import NormSpec, format_float
from .lipschitz import (
    SamplerConfig,
    estimate_joint_lipschitz,
    estimate_per_arg_lipschitz,
    estimate_retraction_lipschitz,
    gap_probe,
)
from .subsets import hausdorff_dist, parse_subset, retraction_3_to_2
from .ternary import SET_KINDS, TernaryOp, VECTOR_KINDS

_DEFAULT_BOUNDS = {
    "incenter": 1.0,
    "nagel": 1.0,
    "median": 1.0,
    "group1d": 1.0,
    "setmix": 1.0,
    "setcomix": 1.0,
    "quotcomix": 1.0,
    "retraction": 9.0,
}


def _norm_spec(args) -> NormSpec:
    p = getattr(args, "p", None) or "2"
    p = p[1:] if p.startswith("p") and p != "p" else p
    pval = math.inf if p in ("inf", "infinity") else float(p)
    weights = None
    if getattr(args, "weights", None):
        weights = tuple(float(w) for w in args.weights.split(","))
    return NormSpec(pval, weights)


def _fmt_vector(v) -> str:
    return ",".join(format_float(x) for x in np.atleast_1d(v))


def _parse_vector_triple(text: str):
    parts = text.split(";")
    if len(parts) != 3:
        raise ValueError(f"expected three ';'-separated points, got {len(parts)}")
    triple = []
    for tok in parts:
        try:
            triple.append(np.array([float(v) for v in tok.split(",")]))
        except ValueError:
            raise ValueError(f"cannot parse point {tok!r}") from None
    if len({v.size for v in triple}) != 1:
        raise ValueError("dimension mismatch among the three points")
    return triple


def _cmd_eval(args) -> int:
    kind = args.op
    if kind in VECTOR_KINDS:
        op = TernaryOp(kind, _norm_spec(args))
        a, b, c = _parse_vector_triple(args.triple)
        out = op(a, b, c)
        print(_fmt_vector(out))
        return 0
    op = TernaryOp(kind)
    parts = args.triple.split(";")
    if len(parts) != 3:
        raise ValueError(f"expected three ';'-separated interval sets, got {len(parts)}")
    sets = [ma.parse_interval_set(tok) for tok in parts]
    if kind == "quotcomix":
        out = op(*(ma.quotient_class(s) for s in sets)).rep
    else:
        out = op(*sets)
    print(ma.format_interval_set(out))
    return 0


def _cmd_measure_algebra(args) -> int:
    sets = [ma.parse_interval_set(tok) for tok in args.sets]

    def need(n):
        if len(sets) != n:
            raise ValueError(f"op {args.op!r} expects {n} interval set(s), got {len(sets)}")

    if args.op == "measure":
        need(1)
        print(f"{sets[0].measure:.12g}")
    elif args.op == "complement":
        need(1)
        print(ma.format_interval_set(sets[0].complement()))
    elif args.op == "quotrep":
        need(1)
        print(ma.format_interval_set(ma.quotient_class(sets[0]).rep))
    elif args.op in ("union", "intersection", "symdiff"):
        need(2)
        out = getattr(sets[0], {"symdiff": "sym_diff"}.get(args.op, args.op))(sets[1])
        print(ma.format_interval_set(out))
    elif args.op == "rho":
        need(2)
        print(f"{ma.rho(sets[0], sets[1]):.12g}")
    elif args.op == "quotdist":
        need(2)
        print(f"{ma.quotient_dist(*(ma.quotient_class(s) for s in sets)):.12g}")
    elif args.op in ("mixer", "comixer"):
        need(3)
        fn = ma.set_mixer if args.op == "mixer" else ma.set_comixer
        print(ma.format_interval_set(fn(*sets)))
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown measure-algebra op {args.op!r}")
    return 0


def _cmd_retract(args) -> int:
    spec = _norm_spec(args)
    try:
        with open(args.pairs, "r", encoding="utf-8") as handle:
            lines = [ln.strip() for ln in handle if ln.strip()]
    except OSError as exc:
        raise ValueError(f"cannot read pairs file: {exc}") from None
    out_lines = ["pair,dh_input,dh_output,ratio"]
    for i, line in enumerate(lines):
        left, sep, right = line.partition(";;")
        if not sep:
            raise ValueError(f"line {i + 1}: expected two sets separated by ';;'")
        e1, e2 = parse_subset(left), parse_subset(right)
        if len(e1) > 3 or len(e2) > 3:
            raise ValueError(f"line {i + 1}: sets must have at most 3 points")
        dh_in = hausdorff_dist(e1, e2, spec)
        dh_out = hausdorff_dist(retraction_3_to_2(e1, spec), retraction_3_to_2(e2, spec), spec)
        ratio = dh_out / dh_in if dh_in > 0 else math.nan
        out_lines.append(f"{i},{dh_in:.12g},{dh_out:.12g},{ratio:.12g}")
    text = "\n".join(out_lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_gap_probe(args) -> int:
    table = gap_probe(args.x_max, args.step)
    lines = ["x,f_x,displacement"]
    lines += [f"{x:.12g},{fx:.12g},{d:.12g}" for x, fx, d in table]
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    ok = all(fx <= -1.0 and d >= x + 1.0 for x, fx, d in table)
    return 0 if ok else 1


def _seed_from(args, fallback: int) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("METRIC_LAB_SEED")
    if env is not None:
        return int(env)
    return fallback


def _cmd_lipschitz(args) -> int:
    kind = args.op
    seed = _seed_from(args, 42)
    cfg = SamplerConfig(seed=seed, count=args.samples, dim=args.dim)
    bound = args.bound if args.bound is not None else _DEFAULT_BOUNDS[kind]
    if kind == "retraction":
        rep = estimate_retraction_lipschitz(cfg, _norm_spec(args), claimed_bound=bound)
    elif args.joint:
        rep = estimate_joint_lipschitz(TernaryOp(kind, _norm_spec(args)), cfg,
                                       claimed_bound=bound)
    elif kind in SET_KINDS:
        rep = estimate_per_arg_lipschitz(TernaryOp(kind), args.arg, cfg,
                                         claimed_bound=bound, tolerance=0.0)
    else:
        rep = estimate_per_arg_lipschitz(TernaryOp(kind, _norm_spec(args)), args.arg,
                                         cfg, claimed_bound=bound)
    print(json.dumps(rep.to_json_dict(), indent=2, sort_keys=True))
    return 0 if rep.passed else 1


def _cmd_certify(args) -> int:
    cfg = SweepConfig()
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                cfg = SweepConfig.from_dict(json.load(handle))
        except OSError as exc:
            raise ValueError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ValueError(f"config is not valid JSON: {exc}") from None
    if args.dims:
        cfg.dims = tuple(int(x) for x in args.dims.split(","))
    if args.norms:
        from .geometry import parse_norm_spec

        cfg.norms = tuple(parse_norm_spec(tok) for tok in args.norms.split(","))
    if args.ops:
        cfg.ops = tuple(args.ops.split(","))
    if args.samples is not None:
        cfg.samples = args.samples
    cfg.seed = _seed_from(args, cfg.seed)
    if args.output:
        cfg.output_path = args.output
    if args.format:
        cfg.format = args.format
    cfg.validate()
    report = run_certification(cfg)
    write_report(report, cfg.output_path, cfg.format)
    n_fail = sum(1 for r in report["results"] if not r["pass"])
    print(f"{len(report['results'])} checks, {n_fail} failed -> {cfg.output_path}")
    return 0 if report["pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metric-lab",
        description="Evaluate ternary mixer/co-mixer operations and certify their bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one operation on one triple")
    ev.add_argument("--op", required=True, choices=VECTOR_KINDS + SET_KINDS)
    ev.add_argument("--p", default="2", help="norm exponent: 1, 2, inf, 1.5, ...")
    ev.add_argument("--weights", default=None, help="comma-separated positive weights")
    ev.add_argument("triple", help='"x1,..;y1,..;z1,.." or "0-0.5;0.25-0.75;0.5-1"')
    ev.set_defaults(func=_cmd_eval)

    mam = sub.add_parser("measure-algebra", help="interval-set operations")
    mam.add_argument("--op", required=True,
                     choices=["union", "intersection", "symdiff", "complement",
                              "measure", "rho", "mixer", "comixer", "quotrep",
                              "quotdist"])
    mam.add_argument("sets", nargs="+", help='interval sets like "0-0.25,0.75-1" or "empty"')
    mam.set_defaults(func=_cmd_measure_algebra)

    rt = sub.add_parser("retract", help="per-pair retraction ratios as CSV")
    rt.add_argument("--p", default="2")
    rt.add_argument("--weights", default=None)
    rt.add_argument("--output", default=None)
    rt.add_argument("pairs", help="file of lines 'x1,..|y1,..|z1,.. ;; u1,..|v1,..'")
    rt.set_defaults(func=_cmd_retract)

    gp = sub.add_parser("gap-probe", help="displacement growth on the split line")
    gp.add_argument("--x-max", type=float, default=100.0)
    gp.add_argument("--step", type=float, default=0.5)
    gp.add_argument("--output", default=None)
    gp.set_defaults(func=_cmd_gap_probe)

    lp = sub.add_parser("lipschitz", help="estimate one Lipschitz constant")
    lp.add_argument("--op", required=True,
                    choices=VECTOR_KINDS + SET_KINDS + ("retraction",))
    lp.add_argument("--arg", type=int, default=1, choices=[1, 2, 3])
    lp.add_argument("--joint", action="store_true",
                    help="perturb all three arguments at once")
    lp.add_argument("--p", default="2")
    lp.add_argument("--weights", default=None)
    lp.add_argument("--dim", type=int, default=2)
    lp.add_argument("--samples", type=int, default=100_000)
    lp.add_argument("--seed", type=int, default=None)
    lp.add_argument("--bound", type=float, default=None,
                    help="claimed bound (defaults to the proven constant)")
    lp.set_defaults(func=_cmd_lipschitz)

    ct = sub.add_parser("certify", help="run the full certification sweep")
    ct.add_argument("--config", default=None, help="JSON file mirroring the sweep config")
    ct.add_argument("--dims", default=None, help="comma-separated dims, e.g. 1,2,3")
    ct.add_argument("--norms", default=None, help="comma-separated norms, e.g. p1,p2,pinf")
    ct.add_argument("--ops", default=None, help="comma-separated op kinds")
    ct.add_argument("--samples", type=int, default=None)
    ct.add_argument("--seed", type=int, default=None)
    ct.add_argument("--output", default=None)
    ct.add_argument("--format", default=None, choices=["json", "csv"])
    ct.set_defaults(func=_cmd_certify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
