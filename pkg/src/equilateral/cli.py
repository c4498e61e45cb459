"""Command-line front end.

Exit codes: 0 success, 1 I/O / parse / domain error, 2 mathematical failure
(non-convergence, verification failure), 3 certificate or precondition failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import construct, norms, radius, verify
from .errors import (
    BoxViolationError,
    DimensionError,
    InvalidNormError,
    PreconditionError,
)
from .jsonio import csv_rows, dumps, load_json_arg, write_text

EXIT_OK, EXIT_IO, EXIT_FAIL, EXIT_PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def parse_n_range(text: str) -> list[int]:
    """``"5"`` or ``"3..6"`` (inclusive)."""
    try:
        if ".." in text:
            lo, hi = (int(t) for t in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise UsageError(f"bad n or n-range {text!r}; use N or LO..HI") from None


def _load_norm(arg: str) -> norms.NormSpec:
    return norms.from_json(load_json_arg(arg))


# ---------------------------------------------------------------- construct


def _certificate(norm, reference, trust_sampled: bool, seed: int):
    try:
        return norms.certificate_exact(norm, reference)
    except norms.UnsupportedFamilyError:
        if not trust_sampled:
            raise PreconditionError(
                "no closed-form certificate for this norm; rerun with "
                "--trust-sampled to accept a sampled (lower-bound) certificate"
            )
        return norms.certificate_sampled(norm, reference, samples=10_000, seed=seed)


def cmd_construct(args) -> int:
    norm = _load_norm(args.norm)
    n = args.dim
    params = None
    if args.space == "linf":
        cert = _certificate(norm, math.inf, args.trust_sampled, args.seed)
        cfg, report = construct.solve_equilateral_linf(norm, n, tol=args.tol,
                                                       certificate=cert)
        expected = n + 1
    else:
        if args.p is None:
            raise UsageError("--space lp needs --p")
        cert = _certificate(norm, args.p, args.trust_sampled, args.seed)
        cfg, report, params = construct.solve_equilateral_lp(
            norm, args.p, n, tol=args.tol, certificate=cert
        )
        expected = n
    audit = verify.certify_run(norm, cfg, report, cert, params=params,
                               expected_points=expected, seed=args.seed)
    summary = {
        "report": report.to_json(),
        "certificate": cert.to_json(),
        "params": params.to_json() if params else None,
        "certification": audit.to_json(),
    }
    _emit(dumps(cfg.to_json()), args.out)
    print(dumps(summary), file=sys.stdout if args.out else sys.stderr)
    if not report.converged:
        return EXIT_FAIL
    hypotheses = ("sandwich", "condition_star")
    if any(not audit.checks[k][0] for k in hypotheses if k in audit.checks):
        return EXIT_PRECONDITION
    return EXIT_OK if audit.passed else EXIT_FAIL


# ---------------------------------------------------------------- radius


def _radius_rows(ps, ns):
    try:
        return [radius.maximize_radius(p, n) for p in ps for n in ns]
    except PreconditionError as exc:
        raise UsageError(str(exc)) from None


def cmd_radius(args) -> int:
    results = _radius_rows(args.p, parse_n_range(args.n))
    if args.format == "json":
        text = dumps([r.to_json() for r in results])
    else:
        text = csv_rows(radius.CSV_HEADER, [r.to_row() for r in results])
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    norm = _load_norm(args.norm)
    cfg = construct.PointConfig.from_json(load_json_arg(args.points))
    rep = verify.check_equilateral(cfg, norm, tol=args.tol)
    _emit(dumps(rep.to_json()), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


# ---------------------------------------------------------------- sweep


def _sweep_job(job):
    p, n, tol, outdir = job
    R = radius.radius(p, n)
    norm = norms.WeightedLp(p, np.full(n, 1.0 / R))
    cfg, report, params = construct.solve_equilateral_lp(norm, p, n, tol=tol)
    eq = verify.check_equilateral(cfg, norm, tol=max(10 * report.residual, 1e-14))
    write_text(Path(outdir) / f"lp_p{p:g}_n{n}.json", dumps(cfg.to_json()))
    return [p, n, R, report.iterations, report.residual, eq.max_deviation,
            "pass" if report.converged and eq.passed else "fail"]


SWEEP_HEADER = ["p", "n", "R", "iterations", "residual", "max_deviation", "status"]


def cmd_sweep(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = [(float(p), n, args.tol, str(outdir))
            for p in args.p for n in parse_n_range(args.n)]
    _radius_rows(args.p, parse_n_range(args.n))  # domain check before dispatch
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_job, jobs))
    else:
        rows = [_sweep_job(j) for j in jobs]
    _emit(csv_rows(SWEEP_HEADER, rows), args.out)
    return EXIT_OK if all(r[-1] == "pass" for r in rows) else EXIT_FAIL


# ---------------------------------------------------------------- parser


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equilateral",
        description="Construct and verify equilateral sets in norms near l_inf^n or l_p^n.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build an equilateral set for a norm")
    c.add_argument("--space", choices=["linf", "lp"], required=True)
    c.add_argument("--dim", type=int, required=True)
    c.add_argument("--p", type=float)
    c.add_argument("--norm", required=True, help="NormSpec JSON file or inline JSON")
    c.add_argument("--tol", type=_positive(float), default=1e-12)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--trust-sampled", action="store_true",
                   help="accept a sampled certificate for families without a closed form")
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    r = sub.add_parser("radius", help="tabulate R(p, n)")
    r.add_argument("--p", type=float, nargs="+", required=True)
    r.add_argument("--n", required=True, help="N or LO..HI")
    r.add_argument("--format", choices=["csv", "json"], default="csv")
    r.add_argument("--out")
    r.set_defaults(func=cmd_radius)

    v = sub.add_parser("verify", help="check a point file for equidistance")
    v.add_argument("--points", required=True)
    v.add_argument("--norm", required=True)
    v.add_argument("--tol", type=_positive(float), default=1e-9)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="extremal l_p constructions over a (p, n) grid")
    s.add_argument("--p", type=float, nargs="+", required=True)
    s.add_argument("--n", required=True, help="N or LO..HI")
    s.add_argument("--tol", type=_positive(float), default=1e-12)
    s.add_argument("--outdir", required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (PreconditionError, BoxViolationError) as exc:
        _err(str(exc))
        return EXIT_PRECONDITION
    except (UsageError, InvalidNormError, DimensionError, OSError,
            json.JSONDecodeError, ValueError) as exc:
        _err(str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
