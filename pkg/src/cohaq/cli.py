"""Command-line interface: ``cohaq <command> [options]``.

Exit codes: 0 success (all checks passed / result emitted), 1 an identity
failed, 2 usage or configuration error (bad arguments, unreadable or
malformed quiver file, identity not applicable to the quiver).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from cohaq.cohomology import CohClass, is_symmetric_in_roots
from cohaq.coproducts import delta_loc, delta_z, shuffle_product
from cohaq.enumerative import bps_invariants
from cohaq.extdata import r_matrix
from cohaq.poly import Z, ParseError, parse_poly
from cohaq.quiver import DimVector, Quiver, QuiverError
from cohaq.spectral import expand_at_infinity, format_fraction, format_series
from cohaq.verify import SUITE_NAMES, list_suites, verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 as well; keep the message format ours
        raise UsageError(message)


def _dim(q: Quiver, text: str) -> DimVector:
    try:
        comps = [int(c) for c in text.replace("(", "").replace(")", "").split(",") if c.strip()]
    except ValueError:
        raise UsageError(f"bad dimension vector {text!r}: expected comma-separated integers") from None
    if any(c < 0 for c in comps):
        raise UsageError(f"bad dimension vector {text!r}: entries must be nonnegative")
    try:
        return q.dim(comps)
    except QuiverError as exc:
        raise UsageError(str(exc)) from None


def _class(q: Quiver, d: DimVector, text: str) -> CohClass:
    try:
        poly = parse_poly(text)
    except ParseError as exc:
        raise UsageError(f"cannot parse class {text!r}: {exc}") from None
    try:
        cls = CohClass(q, d, poly)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not is_symmetric_in_roots(poly, d):
        raise UsageError(f"class {text!r} is not symmetric in the chern roots of each vertex")
    return cls


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cohaq", description="Exact computations with cohomological Hall algebras of quivers.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def with_quiver(sp):
        sp.add_argument("--quiver", required=True, help="quiver JSON file")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    v = sub.add_parser("verify", help="run identity suites")
    with_quiver(v)
    v.add_argument("--suite", default="all", help="suite name, comma-separated list, or 'all'")
    v.add_argument("--max-dim", type=_nonneg, default=3, help="bound on total dimension")

    r = sub.add_parser("rmatrix", help="R-matrix of a pair of dimension vectors")
    with_quiver(r)
    r.add_argument("--d1", required=True)
    r.add_argument("--d2", required=True)
    r.add_argument("--mode", choices=["full", "localised", "taut"], default="full")
    r.add_argument("--order", type=_positive, help="also print the expansion in z^-1 to this order")

    c = sub.add_parser("coproduct", help="vertex or localised coproduct of a class")
    with_quiver(c)
    c.add_argument("--class", dest="cls", required=True, help="class in the roots x[v,a]")
    c.add_argument("--d1", required=True)
    c.add_argument("--d2", required=True)
    c.add_argument("--kind", choices=["vertex", "localised"], default="vertex")
    c.add_argument("--order", type=_positive, help="also print the expansion in z^-1 (vertex kind)")

    m = sub.add_parser("coha-mult", help="shuffle product of two classes")
    with_quiver(m)
    m.add_argument("--a", required=True)
    m.add_argument("--da", required=True)
    m.add_argument("--b", required=True)
    m.add_argument("--db", required=True)
    m.add_argument("--twist", choices=["none", "psi"], default="none")

    y = sub.add_parser("yangian", help="Yangian relations and coproduct comparison on the tripled quiver")
    with_quiver(y)
    y.add_argument("--check", default="r2,r3,drinfeld", help="comma-separated subset of r1,r2,r3,drinfeld")
    y.add_argument("--order", type=_positive, default=8)
    y.add_argument("--max-exp", type=_nonneg, default=4)
    y.add_argument("--max-rs", type=_nonneg, default=4, help="bound on r and s in R2/R3")

    b = sub.add_parser("bps", help="BPS invariants of a symmetric quiver")
    with_quiver(b)
    b.add_argument("--max-dim", type=_nonneg, default=4)
    b.add_argument("--order", type=_positive, default=20)

    ls = sub.add_parser("list-suites", help="list the verification suites")
    ls.add_argument("--json", action="store_true")
    return p


def _load(path: str) -> Quiver:
    try:
        return Quiver.load(path)
    except FileNotFoundError:
        raise UsageError(f"quiver file not found: {path}") from None
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except QuiverError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, text: str, data: dict) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_verify(args) -> int:
    q = _load(args.quiver)
    if args.suite == "all":
        names = "all"
    else:
        names = [s.strip() for s in args.suite.split(",") if s.strip()]
        unknown = [n for n in names if n not in SUITE_NAMES]
        if unknown or not names:
            raise UsageError(f"unknown suite {', '.join(unknown) or '(empty)'}; valid names: {', '.join(SUITE_NAMES)}")
    report = verify(q, names, args.max_dim)
    print(report.to_json() if args.json else report.to_text())
    if names != "all":
        skipped = [s for s in report.suites if s.status == "skipped"]
        if skipped:
            for s in skipped:
                print(f"cohaq: suite {s.name} rejected: {s.reason}", file=sys.stderr)
            return EXIT_USAGE
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_rmatrix(args) -> int:
    q = _load(args.quiver)
    d1, d2 = _dim(q, args.d1), _dim(q, args.d2)
    frac = r_matrix(q, d1, d2, args.mode)
    data = {"d1": list(d1), "d2": list(d2), "mode": args.mode, "fraction": format_fraction(frac)}
    lines = [format_fraction(frac)]
    if args.order:
        if args.mode == "localised":
            raise UsageError("the localised R-matrix has no spectral variable to expand in")
        ser = expand_at_infinity(frac, Z, args.order)
        data["series"] = format_series(ser)
        lines.append(format_series(ser))
    _emit(args, "\n".join(lines), data)
    return EXIT_OK


def cmd_coproduct(args) -> int:
    q = _load(args.quiver)
    d1, d2 = _dim(q, args.d1), _dim(q, args.d2)
    a = _class(q, d1 + d2, args.cls)
    frac = delta_loc(a, d1, d2) if args.kind == "localised" else delta_z(a, d1, d2)
    data = {"d1": list(d1), "d2": list(d2), "kind": args.kind, "fraction": format_fraction(frac)}
    lines = [format_fraction(frac)]
    if args.order:
        if args.kind == "localised":
            raise UsageError("the localised coproduct has no spectral variable to expand in")
        ser = expand_at_infinity(frac, Z, args.order)
        data["series"] = format_series(ser)
        lines.append(format_series(ser))
    _emit(args, "\n".join(lines), data)
    return EXIT_OK


def cmd_coha_mult(args) -> int:
    q = _load(args.quiver)
    da, db = _dim(q, args.da), _dim(q, args.db)
    a, b = _class(q, da, args.a), _class(q, db, args.b)
    prod = shuffle_product(a, b, None if args.twist == "none" else "psi")
    data = {"dim": list(prod.dim), "twist": args.twist, "product": str(prod.poly)}
    _emit(args, str(prod.poly), data)
    return EXIT_OK


def cmd_yangian(args) -> int:
    q = _load(args.quiver)
    checks = tuple(c.strip() for c in args.check.split(",") if c.strip())
    bad = [c for c in checks if c not in ("r1", "r2", "r3", "drinfeld")]
    if bad or not checks:
        raise UsageError(f"unknown check {', '.join(bad) or '(empty)'}; valid: r1, r2, r3, drinfeld")
    opts = {"checks": checks, "order": args.order, "max_exp": args.max_exp, "rs": args.max_rs}
    report = verify(q, ["yangian"], 0, opts)
    print(report.to_json() if args.json else report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_bps(args) -> int:
    q = _load(args.quiver)
    if not q.is_symmetric:
        raise UsageError("bps needs a symmetric quiver")
    res = bps_invariants(q, args.max_dim, args.order)
    rows = res.table()
    ok = res.integral and res.reconstructs
    data = {
        "order": args.order,
        "omega": {",".join(map(str, d)): str(s) for d, s in rows},
        "integral": res.integral,
        "reconstructs": res.reconstructs,
    }
    lines = [f"Omega_{d} = {s}" for d, s in rows]
    lines.append(f"integral: {'yes' if res.integral else 'no'}")
    lines.append(f"reconstruction: {'exact' if res.reconstructs else 'FAILED'}")
    _emit(args, "\n".join(lines), data)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_list_suites(args) -> int:
    suites = list_suites()
    if args.json:
        print(json.dumps(suites, indent=2))
    else:
        for s in suites:
            print(f"{s['name']:14} {s['anchor']}")
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "rmatrix": cmd_rmatrix,
    "coproduct": cmd_coproduct,
    "coha-mult": cmd_coha_mult,
    "yangian": cmd_yangian,
    "bps": cmd_bps,
    "list-suites": cmd_list_suites,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("missing command; choose from " + ", ".join(COMMANDS))
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cohaq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
