"""Command line entry point: ``bte <command> ...``.

Exit codes: 0 success, 1 crosscheck found a MISMATCH, 2 usage error,
3 computation error (a JSON error object is printed on stdout).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .counting import (
    MISMATCH,
    CellReport,
    EVector,
    check_cell,
    chi,
    evector_formula,
    evector_keys,
    oracle_evector,
    standard_grid,
)
from .counting.formulas import CONVENTIONS
from .errors import BTError
from .moebius import MoebiusMap, act_on_ball_lattice, act_on_ball_partition, apply_to_end, cross_ratio
from .orders import KINDS, Branch, OrderSpec, branch_symbolic
from .padic import default_precision, from_fraction, is_prime
from .tree import INFINITY, Ball, End, ball_label, enumerate_region, parent, to_dot_graph

METHODS = ("formula", "keys", "oracle")
COUNTED_KINDS = ("nilpotent", "split", "triangular")


def _exact(x) -> object:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def evector_json(p: int, spec: OrderSpec, r: int, ev: EVector, stabilized: Optional[bool] = None) -> dict:
    out = {
        "p": p,
        "order": {"kind": spec.kind, "t": spec.t},
        "level": r,
        "e": [_exact(x) for x in ev.raw],
        "method": ev.method,
        "flags": list(ev.flags),
        "stabilized": stabilized,
    }
    if ev.reason:
        out["reason"] = ev.reason
    if ev.convention:
        out["convention"] = ev.convention
    return out


def _fmt_e(ev: EVector) -> str:
    return ",".join(str(_exact(x)) for x in ev.raw)


# --- parsing helpers ---------------------------------------------------------


def _prime(s: str) -> int:
    try:
        p = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}")
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"not a prime: {p}")
    return p


def _nonneg(s: str) -> int:
    try:
        k = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}")
    if k < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {k}")
    return k


def _positive(s: str) -> int:
    k = _nonneg(s)
    if k == 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return k


def _rational(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")


def _end_token(s: str) -> Optional[Fraction]:
    if s.lower() in ("inf", "infinity", "oo"):
        return None
    return _rational(s)


def _make_end(p: int, x: Optional[Fraction], N: int) -> End:
    return INFINITY if x is None else End(from_fraction(p, x, N))


def _end_text(e: End) -> str:
    return "inf" if e.is_infinity else str(e.value.lift())


# --- commands ----------------------------------------------------------------


def cmd_numbers(args) -> int:
    spec = OrderSpec(args.order, args.p, args.t)
    methods = METHODS if args.method == "all" else (args.method,)
    rows = []
    for m in methods:
        if m == "formula":
            rows.append(evector_json(args.p, spec, args.level, evector_formula(args.p, spec, args.level, args.u0)))
        elif m == "keys":
            rows.append(evector_json(args.p, spec, args.level, evector_keys(args.p, spec, args.level)))
        else:
            kw = {"budget": args.budget} if args.budget else {}
            rep = oracle_evector(args.p, spec, args.level, N=args.precision, require_stable=False, **kw)
            rows.append(evector_json(args.p, spec, args.level, rep.evector, rep.stabilized))
    if args.format == "json":
        print(json.dumps(rows[0] if len(rows) == 1 else rows))
    else:
        print("method\te1\te2\te3\te4\tflags\tstabilized")
        for row in rows:
            flags = ",".join("e%d" % (i + 1) for i, f in enumerate(row["flags"]) if f) or "-"
            stab = "-" if row["stabilized"] is None else str(row["stabilized"]).lower()
            print("\t".join([row["method"], *(str(x) for x in row["e"]), flags, stab]))
    return 0


def _cell_json(rep: CellReport) -> dict:
    return {
        "p": rep.p,
        "order": {"kind": rep.spec.kind, "t": rep.spec.t},
        "level": rep.r,
        "formula": evector_json(rep.p, rep.spec, rep.r, rep.formula),
        "keys": evector_json(rep.p, rep.spec, rep.r, rep.keys),
        "oracle": evector_json(rep.p, rep.spec, rep.r, rep.oracle.evector, rep.oracle.stabilized),
        "verdict": rep.verdict,
        "note": rep.note,
    }


def cmd_crosscheck(args) -> int:
    grid = standard_grid(args.kinds, args.r_max)
    reports = []
    if args.format == "table":
        print("p\tkind\tt\tr\tformula\tconvention\tkeys\toracle\tstabilized\tverdict\tnote")
    for p in args.p:
        for cell in grid:
            rep = check_cell(p, cell, args.u0, N=args.precision, budget=args.budget)
            reports.append(rep)
            if args.format == "table":
                print(
                    "\t".join(
                        str(x)
                        for x in (
                            p,
                            cell.kind,
                            rep.spec.t,
                            cell.r,
                            _fmt_e(rep.formula),
                            rep.formula.convention or "-",
                            _fmt_e(rep.keys),
                            _fmt_e(rep.oracle.evector),
                            str(rep.oracle.stabilized).lower(),
                            rep.verdict,
                            rep.note or "-",
                        )
                    )
                )
                sys.stdout.flush()
    if args.format == "json":
        print(json.dumps([_cell_json(r) for r in reports]))
    if args.figure:
        from .plotting import plot_crosscheck

        plot_crosscheck(reports, args.figure)
    return 1 if any(r.verdict == MISMATCH for r in reports) else 0


def branch_description(spec: OrderSpec, radius: int) -> tuple[dict, Branch, list[Ball]]:
    """JSON-ready vertices and edges of the standard order's branch within ``radius`` of B_0^[0]."""
    branch = branch_symbolic(spec)
    vs = sorted(branch.restrict(enumerate_region(Ball(spec.p, 0, 0), radius)), key=Ball.sort_key)
    vset = set(vs)
    vertices = [
        {
            "label": ball_label(v),
            "center": str(v.center),
            "n": v.n,
            "stem": branch.on_stem(v),
            "endpoint": branch.is_endpoint(v),
        }
        for v in vs
    ]
    edges = [[ball_label(parent(v)), ball_label(v)] for v in vs if parent(v) in vset]
    return {
        "p": spec.p,
        "order": {"kind": spec.kind, "t": spec.t, "r": spec.r},
        "radius": radius,
        "branch": {"kind": branch.kind, "depth": branch.depth, "level": branch.level},
        "vertices": vertices,
        "edges": edges,
    }, branch, vs


def cmd_branch(args) -> int:
    spec = OrderSpec(args.order, args.p, args.t, args.r)
    desc, branch, vs = branch_description(spec, args.radius)
    stem = [v for v in vs if branch.on_stem(v)]
    ends = [v for v in vs if branch.is_endpoint(v)]
    if args.format == "json":
        print(json.dumps(desc))
    elif args.format == "dot":
        styles = {v: "box" for v in stem}
        attrs = {v: {"endpoint": "true"} for v in ends}
        print(to_dot_graph(vs, styles, name="branch", directed=True, attrs=attrs), end="")
    else:
        print("label\tcenter\tn\tstem\tendpoint")
        for v in desc["vertices"]:
            print(f"{v['label']}\t{v['center']}\t{v['n']}\t{str(v['stem']).lower()}\t{str(v['endpoint']).lower()}")
    if args.figure:
        from .plotting import plot_branch

        plot_branch(vs, stem, ends, args.figure, title=f"{spec.kind} p={spec.p} t={spec.t} r={spec.r}")
    return 0


def cmd_chi(args) -> int:
    print(chi(args.p, args.r, args.u, args.t, args.u0))
    return 0


def cmd_act(args) -> int:
    N = args.precision or default_precision()
    s = MoebiusMap.from_entries(args.p, *args.matrix, N=N)
    if args.ball is not None:
        z, n = args.ball
        B = Ball(args.p, _rational(z), int(n))
        img = act_on_ball_partition(s, B) if args.method == "partition" else act_on_ball_lattice(s, B)
        print(ball_label(img))
    else:
        print(_end_text(apply_to_end(s, _make_end(args.p, _end_token(args.end), N))))
    return 0


def cmd_crossratio(args) -> int:
    N = args.precision or default_precision()
    ends = [_make_end(args.p, x, N) for x in args.ends]
    x = cross_ratio(*ends)
    out = {"p": args.p, "value": str(x.lift()), "valuation": None if x.is_zero() else x.valuation}
    out["unit"] = None if x.is_zero() else x.unit
    out["precision"] = x.precision
    print(json.dumps(out))
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bte", description="Embedding numbers on the Bruhat-Tits tree of PGL2(Q_p).")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("numbers", help="e1..e4 for one order and level")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--order", choices=KINDS, required=True)
    sp.add_argument("--level", type=_nonneg, required=True)
    sp.add_argument("--t", type=_nonneg, default=0)
    sp.add_argument("--method", choices=(*METHODS, "all"), default="formula")
    sp.add_argument("--u0", choices=CONVENTIONS, default="auto")
    sp.add_argument("--precision", type=_positive, help="oracle modulus exponent")
    sp.add_argument("--budget", type=_positive, help="oracle point budget")
    sp.add_argument("--format", choices=("json", "table"), default="json")
    sp.set_defaults(func=cmd_numbers)

    sp = sub.add_parser("crosscheck", help="formula vs keys vs oracle on a grid")
    sp.add_argument("--p", type=_prime, nargs="+", default=[2, 3])
    sp.add_argument("--kinds", nargs="+", choices=COUNTED_KINDS, default=list(COUNTED_KINDS))
    sp.add_argument("--r-max", type=_nonneg, default=4)
    sp.add_argument("--u0", choices=CONVENTIONS, default="auto")
    sp.add_argument("--precision", type=_positive, help="oracle modulus exponent")
    sp.add_argument("--budget", type=_positive)
    sp.add_argument("--format", choices=("table", "json"), default="table")
    sp.add_argument("--figure", help="write a PNG summary here")
    sp.set_defaults(func=cmd_crosscheck)

    sp = sub.add_parser("branch", help="branch of the standard order near B_0^[0]")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--order", choices=KINDS, required=True)
    sp.add_argument("--t", type=_nonneg, default=0)
    sp.add_argument("--r", type=_nonneg, default=0, help="Eichler level (eichler kind only)")
    sp.add_argument("--radius", type=_nonneg, default=3)
    sp.add_argument("--format", choices=("dot", "json", "table"), default="dot")
    sp.add_argument("--figure", help="write a PNG drawing here")
    sp.set_defaults(func=cmd_branch)

    sp = sub.add_parser("chi", help="square roots of 1 at a given distance from 1")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--r", type=_nonneg, required=True)
    sp.add_argument("--u", type=_nonneg, required=True)
    sp.add_argument("--t", type=_nonneg, required=True)
    sp.add_argument("--u0", choices=CONVENTIONS, default="one")
    sp.set_defaults(func=cmd_chi)

    sp = sub.add_parser("act", help="apply a matrix to a ball or an end")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("--matrix", type=_rational, nargs=4, required=True, metavar=("A", "B", "C", "D"))
    target = sp.add_mutually_exclusive_group(required=True)
    target.add_argument("--ball", nargs=2, metavar=("Z", "N"))
    target.add_argument("--end", help="rational or 'inf'")
    sp.add_argument("--method", choices=("lattice", "partition"), default="lattice")
    sp.add_argument("--precision", type=_positive)
    sp.set_defaults(func=cmd_act)

    sp = sub.add_parser("crossratio", help="[a,b;c,d] of four ends")
    sp.add_argument("--p", type=_prime, required=True)
    sp.add_argument("ends", type=_end_token, nargs=4, metavar="END")
    sp.add_argument("--precision", type=_positive)
    sp.set_defaults(func=cmd_crossratio)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "act" and args.ball is not None:
        try:
            _rational(args.ball[0])
            int(args.ball[1])
        except (argparse.ArgumentTypeError, ValueError):
            ap.error(f"--ball expects a rational center and an integer exponent, got {args.ball}")
    try:
        return args.func(args)
    except (BTError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 3
    except BrokenPipeError:
        # downstream closed early (e.g. `| head`); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
