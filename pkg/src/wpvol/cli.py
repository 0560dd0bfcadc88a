"""Command line interface: ``wpvol <command> ...``.

Exit codes: 0 success, 1 a requested check failed, 2 usage error,
3 numerical non-convergence.  JSON payloads carry ``"schema": 1``.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import List, Optional

from . import chambers, charvar, hypgeom, identities
from .exactpoly import PI2, PiScalar, exact_eval, numeric_eval
from .volumes import CACHE_ENV, DEFAULT_MAX_DIM, UnstableError, VolumeTable, dimension, stable_keys

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONVERGENCE = 0, 1, 2, 3

log = logging.getLogger("wpvol")


class UsageError(Exception):
    pass


def _emit(payload: dict) -> None:
    out = {"schema": SCHEMA}
    out.update(payload)
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def _cache_dir(args) -> Optional[Path]:
    if args.no_cache:
        return None
    if args.cache_dir:
        return Path(args.cache_dir)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "wpvol"


def _table(args) -> VolumeTable:
    return VolumeTable(cache_dir=_cache_dir(args), max_dim=args.max_dim)


def _require_stable(g: int, n: int, max_dim: int) -> None:
    if g < 0 or n < 0 or not (2 * g - 2 + n > 0 or (n == 0 and g >= 2)):
        raise UsageError(f"(g, n) = ({g}, {n}) is unstable")
    if dimension(g, n) > max_dim:
        raise UsageError(f"dimension {dimension(g, n)} of ({g}, {n}) exceeds --max-dim {max_dim}")


def _angle(text: str):
    try:
        return chambers.parse_angle(text)
    except ValueError:
        raise UsageError(f"cannot parse angle {text!r}") from None


def _labels(text: str) -> List[chambers.BoundaryLabel]:
    try:
        return chambers.parse_labels(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- commands ------------------------------------------------------------------


def cmd_poly(args) -> int:
    _require_stable(args.g, args.n, args.max_dim)
    poly = _table(args).get(args.g, args.n)
    if args.format == "json":
        _emit({"command": "poly", "g": args.g, "n": args.n, "text": poly.to_text(),
               "polynomial": json.loads(poly.to_json())})
    else:
        print(poly.to_text())
    return EXIT_OK


def _exact_value(poly, labels) -> Optional[PiScalar]:
    squares = []
    for lab in labels:
        if lab.kind == "cusp":
            squares.append(0)
        elif lab.is_cone and lab.pi_multiple is not None:
            squares.append(PI2 * (-lab.pi_multiple ** 2))
        else:
            return None
    return exact_eval(poly, squares)


def cmd_eval(args) -> int:
    labels = _labels(args.labels)
    if len(labels) != args.n:
        raise UsageError(f"{len(labels)} labels given for n = {args.n}")
    _require_stable(args.g, args.n, args.max_dim)
    poly = _table(args).get(args.g, args.n)
    report = chambers.classify_validity(args.g, labels) if args.n else None
    warnings = []
    if report is not None and not report.is_volume:
        warnings.append("value is not known to be a volume: " + "; ".join(report.notes or ["unknown region"]))
    exact = _exact_value(poly, labels)
    _emit({
        "command": "eval",
        "g": args.g,
        "n": args.n,
        "value": numeric_eval(poly, labels),
        "exact": None if exact is None else str(exact),
        "chamber": None if report is None else report.to_dict(),
        "warnings": warnings,
    })
    for w in warnings:
        log.warning(w)
    return EXIT_OK


def cmd_chamber(args) -> int:
    labels = _labels(args.labels)
    try:
        report = chambers.classify_validity(args.g, labels)
    except UnstableError as exc:
        raise UsageError(str(exc)) from None
    _emit({"command": "chamber", "report": report.to_dict()})
    return EXIT_OK


def _verify_cv(thetas: List[float], tol: float, jobs: Optional[int]) -> List[dict]:
    rows = []
    for theta in thetas:
        res = charvar.volume_integral(theta, rel_tol=min(tol, 1e-8), jobs=jobs)
        cf_raw, cf_final = charvar.closed_form_raw(theta), charvar.closed_form_final(theta)
        err_raw = abs(res.raw - cf_raw) / res.raw
        err_final = abs(res.final - cf_final) / res.final
        ok = err_raw < tol and (err_final < tol or abs(res.final - cf_final) < 1e-6)
        rows.append({"identity": "cv_volume", "theta": theta, "raw": res.raw, "final": res.final,
                     "rel_err_raw": err_raw, "rel_err_final": err_final, "pass": ok})
    return rows


CV_THETAS = (0.0, 1.0, math.pi / 2, math.pi, 2.0, 3 * math.pi / 2, 5.0, 6.2)


def cmd_verify(args) -> int:
    table = _table(args)
    table.max_dim = None
    rows: List[dict] = []
    suite = args.suite
    if suite in ("limit", "all"):
        rows += [r.to_dict() for r in identities.limit_suite(args.max_dim, table)]
    if suite in ("corollary", "all"):
        keys = [k for k in stable_keys(args.max_dim - 1, min_n=0) if k != (1, 0)]
        for g, n in keys:
            rows += [r.to_dict() for r in identities.check_two_pi_corollary(g, n, table)]
    if suite in ("v05", "all"):
        rows += [r.to_dict() for r in identities.check_v05_factorizations(table)]
    if suite in ("cv", "all"):
        thetas = [_angle(args.theta)[0]] if args.theta is not None else list(CV_THETAS)
        rows += _verify_cv(thetas, args.tol, args.jobs)
    passed = all(r["pass"] for r in rows)
    _emit({"command": "verify", "suite": suite, "pass": passed, "checks": len(rows),
           "failures": [r for r in rows if not r["pass"]], "results": rows})
    return EXIT_OK if passed else EXIT_FAIL


def _round(x, digits):
    return None if x is None else round(x, digits)


def cmd_geom(args) -> int:
    kind = args.geom
    if kind == "hexagon":
        value = hypgeom.hexagon_delta(args.L1, args.L2, args.c)
        extra = {"bound": hypgeom.hexagon_bound(args.L1, args.L2)}
    elif kind == "pentagon":
        theta = _angle(args.theta)[0]
        value = hypgeom.pentagon_delta(args.L1, theta, args.c)
        extra = {"bound": hypgeom.pentagon_bound(args.L1)}
    elif kind == "quad":
        value = hypgeom.quad_delta(_angle(args.theta1)[0], _angle(args.theta2)[0], args.c)
        extra = {}
    elif kind == "obtuse":
        value = hypgeom.obtuse_pentagon_sinh_delta(_angle(args.alpha)[0], args.Lp, args.c)
        extra = {"no_solution": value is None}
    elif kind == "crown":
        phi = _angle(args.phi)[0]
        value = hypgeom.crown_length(phi, args.L)
        extra = {"residual": hypgeom.crown_residual(value, phi, args.L)}
    elif kind == "glue":
        value = hypgeom.cone_glue_w(args.x, _angle(args.phi)[0])
        extra = {}
    else:
        a, b = chambers.parse_label(args.a), chambers.parse_label(args.b)
        value = hypgeom.separation_bound(a, b)
        extra = {"regime": hypgeom.separation_regime(a, b)}
    p = args.precision
    extra = {k: (_round(v, p) if isinstance(v, float) else v) for k, v in extra.items()}
    if args.format == "text":
        print("None" if value is None else f"{value:.{p}f}")
    else:
        _emit({"command": "geom", "kind": kind, "value": _round(value, p), **extra})
    return EXIT_OK


def cmd_cv_volume(args) -> int:
    theta, _ = _angle(args.theta)
    if not 0 <= theta < 2 * math.pi:
        raise UsageError(f"theta must lie in [0, 2pi), got {theta}")
    res = charvar.volume_integral(theta, rel_tol=args.tol, jobs=args.jobs)
    cf_raw, cf_final = charvar.closed_form_raw(theta), charvar.closed_form_final(theta)
    _emit({"command": "cv-volume", "theta": theta, "kappa": res.kappa, "raw": res.raw,
           "final": res.final, "error_estimate": res.error, "closed_form_raw": cf_raw,
           "closed_form_final": cf_final, "rel_err": abs(res.raw - cf_raw) / res.raw})
    return EXIT_OK


def cmd_cv_reduce(args) -> int:
    try:
        point = tuple(float(v) for v in args.point.split(","))
    except ValueError:
        raise UsageError(f"cannot parse point {args.point!r}") from None
    if len(point) != 3:
        raise UsageError("--point needs three comma-separated coordinates")
    if min(point) < 2:
        raise UsageError("trace coordinates must be >= 2")
    reduced, word = charvar.reduce_to_domain(point, strategy=args.strategy)
    h = charvar.to_homogeneous(reduced)
    _emit({"command": "cv-reduce", "input": list(point), "kappa": charvar.kappa(point),
           "reduced": list(reduced), "homogeneous": list(h), "word": word})
    return EXIT_OK


def cmd_scan(args) -> int:
    _require_stable(args.g, args.n, args.max_dim)
    poly = _table(args).get(args.g, args.n)
    report = chambers.positivity_scan(args.g, args.n, samples=args.samples, seed=args.seed,
                                      poly=poly, chunks=max(1, args.jobs or 8))
    if args.csv:
        if args.csv == "-":
            report.write_csv(sys.stdout)
        else:
            with open(args.csv, "w", newline="") as fh:
                report.write_csv(fh)
    if args.csv != "-":
        _emit({"command": "scan", "g": args.g, "n": args.n, "samples": args.samples,
               "seed": args.seed, "min_value": report.min_value, "argmin": report.argmin,
               "violations": len(report.violations)})
    return EXIT_OK if not report.violations else EXIT_FAIL


def cmd_cache(args) -> int:
    path = _cache_dir(args)
    if args.action == "path":
        print(path if path is not None else "")
        return EXIT_OK
    if path is None:
        raise UsageError("no cache directory (--no-cache given)")
    if args.action == "clear":
        if path.is_dir():
            for f in path.glob("vol_g*_n*.json"):
                f.unlink()
        print(f"cleared {path}")
        return EXIT_OK
    table = VolumeTable(cache_dir=path)
    for g, n in stable_keys(args.max_dim, min_n=0):
        if n or g >= 2:
            table.get(g, n)
    print(f"{len(table)} polynomials in {path}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _global_options(top: bool) -> argparse.ArgumentParser:
    # repeated on every subcommand; defaults live on the top-level parser only
    common = argparse.ArgumentParser(add_help=False)
    kw = {} if top else {"default": argparse.SUPPRESS}
    common.add_argument("--cache-dir", help=f"polynomial cache (default ${CACHE_ENV} or ~/.cache/wpvol)",
                        **({"default": None} if top else kw))
    common.add_argument("--no-cache", action="store_true", help="keep polynomials in memory only", **kw)
    common.add_argument("--max-dim", type=int, help="dimension cap 3g-3+n",
                        **({"default": DEFAULT_MAX_DIM} if top else kw))
    common.add_argument("--jobs", type=int, help="worker cap", **({"default": None} if top else kw))
    common.add_argument("-v", "--verbose", action="store_true", **kw)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_options(top=False)
    parser = argparse.ArgumentParser(prog="wpvol", parents=[_global_options(top=True)],
                                     description="Weil-Petersson volume polynomials at cone-angle boundary data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poly", parents=[common], help="print V_{g,n}")
    p.add_argument("g", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("eval", parents=[common], help="evaluate V_{g,n} at boundary labels")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--labels", required=True,
                   help="comma list: <float> geodesic, cusp, <float>i or <p>/<q>pi i cone")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("chamber", parents=[common], help="classify boundary labels")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--labels", required=True)
    p.set_defaults(func=cmd_chamber)

    p = sub.add_parser("verify", parents=[common], help="run identity and quadrature checks")
    p.add_argument("suite", choices=("limit", "corollary", "v05", "cv", "all"))
    p.add_argument("--theta", help="single cone angle for the cv suite")
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("geom", parents=[common], help="hyperbolic trigonometry")
    p.add_argument("--precision", type=int, default=12)
    p.add_argument("--format", choices=("text", "json"), default="json")
    gsub = p.add_subparsers(dest="geom", required=True)
    q = gsub.add_parser("hexagon")
    q.add_argument("L1", type=float)
    q.add_argument("L2", type=float)
    q.add_argument("--c", type=float, default=0.0)
    q = gsub.add_parser("pentagon")
    q.add_argument("L1", type=float)
    q.add_argument("theta")
    q.add_argument("--c", type=float, default=0.0)
    q = gsub.add_parser("quad")
    q.add_argument("theta1")
    q.add_argument("theta2")
    q.add_argument("--c", type=float, default=0.0)
    q = gsub.add_parser("obtuse")
    q.add_argument("alpha")
    q.add_argument("Lp", type=float)
    q.add_argument("--c", type=float, default=0.0)
    q = gsub.add_parser("crown")
    q.add_argument("phi")
    q.add_argument("L", type=float)
    q = gsub.add_parser("glue")
    q.add_argument("x", type=float)
    q.add_argument("phi")
    q = gsub.add_parser("separation")
    q.add_argument("a", help="boundary label")
    q.add_argument("b", help="boundary label")
    p.set_defaults(func=cmd_geom)

    p = sub.add_parser("cv-volume", parents=[common], help="character-variety quadrature of Vol(M_{1,1}(i theta))")
    p.add_argument("--theta", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_cv_volume)

    p = sub.add_parser("cv-reduce", parents=[common], help="reduce a trace triple to the fundamental domain")
    p.add_argument("--point", required=True)
    p.add_argument("--strategy", choices=("greedy", "first"), default="greedy")
    p.set_defaults(func=cmd_cv_reduce)

    p = sub.add_parser("scan", parents=[common], help="main-chamber positivity scan")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="write samples as CSV ('-' for stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("cache", parents=[common], help="build, clear or locate the polynomial cache")
    p.add_argument("action", choices=("build", "clear", "path"))
    p.set_defaults(func=cmd_cache)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs is not None and args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except (UsageError, UnstableError, hypgeom.NoBracketError) as exc:
        print(f"wpvol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (charvar.QuadratureError, charvar.ReductionError) as exc:
        print(f"wpvol: did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValueError as exc:
        print(f"wpvol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
