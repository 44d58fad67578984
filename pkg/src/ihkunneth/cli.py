"""Command line front end.  Exit status: 0 all pass, 1 mismatch, 2 usage or input error."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from .exactalg import Ring
from .ichain import CoefficientSpec, intersection_homology, relative_intersection_homology
from .library import SpaceError, parse_expression, serialize_space
from .oracle import (
    BudgetExceeded,
    check_budget,
    explore_shifts,
    verify_cone,
    verify_join,
    verify_kunneth,
    verify_super_counterexample,
)
from .perversity import (
    Perversity,
    PerversityError,
    ProductPerversity,
    make_product_perversity,
    parse_perversity,
)
from .stratcomplex import normal_link, ordinary_homology, validate_pseudomanifold

EXIT_PASS, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ring(text: str) -> Ring:
    try:
        return Ring.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _coeff(args) -> CoefficientSpec:
    return CoefficientSpec(args.ring, args.coeff)


def _space(text: str):
    return parse_expression(text)


def _perv(text: Optional[str], n: int, default: str = "zero") -> Perversity:
    return parse_perversity(text or default, n)


def _parse_shift(text: Optional[str]):
    """``2`` (every interior cell) or ``3,3=2;2,3=1`` (listed cells)."""
    if text is None:
        return None
    text = text.strip()
    if "=" not in text:
        return int(text)
    cells = {}
    for part in text.split(";"):
        lhs, rhs = part.split("=")
        k, l = (int(x) for x in lhs.split(","))
        cells[(k, l)] = int(rhs)
    return cells


def _parse_table(text: str) -> List[List[int]]:
    return [[int(x) for x in row.split(",")] for row in text.split(";")]


def _product_perversity(args, p: Perversity, q: Perversity, m: int, n: int) -> ProductPerversity:
    mode = args.q_mode or ("shift" if args.shift is not None else "sum")
    if mode == "cgj":
        p = parse_perversity(args.perversity or "zero", m + n)
    if mode == "table":
        if not args.table:
            raise UsageError("--q-mode table needs --table 'r0;r1;...'")
        return make_product_perversity("table", p, q, table=_parse_table(args.table))
    return make_product_perversity(mode, p, q, shifts=_parse_shift(args.shift), m=m, n=n)


class Output:
    def __init__(self, path: Optional[str]):
        self.path = path
        self.records = []

    def emit(self, text: str, record=None):
        print(text)
        if record is not None:
            self.records.append(record)

    def close(self):
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                json.dump(self.records if len(self.records) != 1 else self.records[0], fh, indent=2)


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(args, out: Output) -> int:
    X = _space(args.space)
    rep = validate_pseudomanifold(X)
    lines = [
        f"{X.name}: dim {X.dim}, f-vector {X.f_vector()}",
        f"  pure: {rep.pure}",
        f"  no codimension-one stratum: {rep.no_codim_one}",
        f"  full skeleta: {rep.full_skeleta}",
        f"  occupied codimensions: {rep.occupied_codims}",
    ] + [f"  note: {n}" for n in rep.notes]
    out.emit("\n".join(lines), {"space": X.name, "ok": rep.ok, "pure": rep.pure,
                                "no_codim_one": rep.no_codim_one, "full": rep.full_skeleta,
                                "codims": rep.occupied_codims, "notes": rep.notes})
    if args.print_space:
        print(serialize_space(X), end="")
    return EXIT_PASS if rep.ok else EXIT_MISMATCH


def cmd_homology(args, out: Output) -> int:
    X = _space(args.space)
    check_budget(len(X.simplices[-1]) if X.simplices else 0, args.budget, X.name)
    H = ordinary_homology(X, args.ring)
    out.emit(str(H), {"space": X.name, "ring": str(args.ring), "homology": str(H)})
    return EXIT_PASS


def _ih_perversity(args, X):
    if X.width == 2:
        m = max(lab[0] for lab in X.labels)
        n = max(lab[1] for lab in X.labels)
        p = _perv(args.perversity, m)
        q = _perv(args.q, n) if args.q else Perversity(p.extended(n).values[: n + 1])
        return _product_perversity(args, p, q, m, n)
    return _perv(args.perversity, X.dim)


def cmd_ih(args, out: Output) -> int:
    X = _space(args.space)
    check_budget(len(X.simplices[-1]) if X.simplices else 0, args.budget, X.name)
    P = _ih_perversity(args, X)
    coeff = _coeff(args)
    if args.relative:
        A = _space(args.relative)
        H = relative_intersection_homology(X, A, P, coeff)
    else:
        H = intersection_homology(X, P, coeff)
    out.emit(str(H), {"space": X.name, "coeff": str(coeff), "homology": str(H)})
    return EXIT_PASS


def cmd_link(args, out: Output) -> int:
    X = _space(args.space)
    v = int(args.vertex) if args.vertex.isdigit() else X.names.index(args.vertex)
    L = normal_link(X, v)
    k = sum(X.labels[v])
    text = [f"link of {X.names[v]} (codimension {k}): dim {L.dim}, f-vector {L.f_vector()}"]
    rec = {"space": X.name, "vertex": X.names[v], "codim": k, "f_vector": L.f_vector()}
    if L.num_vertices:
        H = intersection_homology(L, _ih_perversity(args, L), _coeff(args))
        text.append(f"  IH: {H}")
        rec["homology"] = str(H)
    if args.print_space:
        text.append(serialize_space(L).rstrip())
    out.emit("\n".join(text), rec)
    return EXIT_PASS


def cmd_cone_check(args, out: Output) -> int:
    L = _space(args.space)
    p = _perv(args.perversity, L.dim + 1)
    a, r = verify_cone(L, p, _coeff(args))
    for rep in (a, r):
        out.emit(rep.to_text(), rep.to_dict())
    return EXIT_PASS if a.match and r.match else EXIT_MISMATCH


def cmd_join_check(args, out: Output) -> int:
    L1, L2 = _space(args.l1), _space(args.l2)
    k, l = L1.dim + 1, L2.dim + 1
    p, q = _perv(args.perversity, k), _perv(args.q, l)
    Q = _product_perversity(args, p, q, k, l)
    rep = verify_join(L1, L2, p, q, Q, _coeff(args))
    out.emit(rep.to_text(), rep.to_dict())
    return EXIT_PASS if rep.match else EXIT_MISMATCH


def cmd_kunneth_check(args, out: Output) -> int:
    X, Y = _space(args.x), _space(args.y)
    p, q = _perv(args.perversity, X.dim), _perv(args.q or args.perversity, Y.dim)
    Q = _product_perversity(args, p, q, X.dim, Y.dim)
    rep = verify_kunneth(X, Y, p, q, Q, _coeff(args), args.budget)
    out.emit(rep.to_text(), rep.to_dict())
    return EXIT_PASS if rep.match else EXIT_MISMATCH


def cmd_super(args, out: Output) -> int:
    X, Y = _space(args.x), _space(args.y)
    k, l = X.dim + 1, Y.dim + 1
    p = _perv(args.perversity, k) if args.perversity else Perversity(tuple([0] * k + [k - 1]))
    q = _perv(args.q, l)
    rep = verify_super_counterexample(X, Y, p, q, args.ring, args.budget)
    out.emit(rep.to_text(), rep.to_dict())
    return EXIT_PASS if rep.passed else EXIT_MISMATCH


def cmd_explore(args, out: Output) -> int:
    X, Y = _space(args.x), _space(args.y)
    p, q = _perv(args.perversity, X.dim), _perv(args.q or args.perversity, Y.dim)
    shifts = [int(s) for s in args.shifts.split(",")]
    rows = explore_shifts(X, Y, p, q, _coeff(args), shifts, args.max_jobs, args.budget)
    lines = [f"{'shift':>5}  {'theorem':<15} observed"]
    ok = True
    for s, rep in rows:
        lines.append(f"{s:>5}  {('guaranteed' if rep.guaranteed else 'not guaranteed'):<15} "
                     f"{'match' if rep.match else 'mismatch'}")
        ok = ok and rep.consistent
    out.emit("\n".join(lines), [dict(shift=s, **rep.to_dict()) for s, rep in rows])
    return EXIT_PASS if ok else EXIT_MISMATCH


def cmd_suite(args, out: Output) -> int:
    from .suite import run_suite

    only = [int(c) for c in args.only.split(",")] if args.only else None
    results = run_suite(only, progress=lambda r: print(r.line(), flush=True))
    failed = [r for r in results if not r.passed]
    summary = f"{len(results) - len(failed)}/{len(results)} cases passed"
    out.emit(summary, [dict(criterion=r.criterion, name=r.name, passed=r.passed, detail=r.detail,
                            seconds=round(r.seconds, 3)) for r in results])
    return EXIT_PASS if not failed else EXIT_MISMATCH


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", type=_ring, default=Ring.parse("Z"), help="Z, Q or Zp:<p>")
    common.add_argument("--coeff", choices=["constant", "r0", "stratified-zero", "saralegi"], default="constant")
    common.add_argument("--perversity", help="preset name or comma separated values p(0),p(1),...")
    common.add_argument("--q", help="second perversity for products and joins")
    common.add_argument("--q-mode", choices=["sum", "cgj", "king", "shift", "table"])
    common.add_argument("--shift", help="uniform shift or cells 'k,l=s;...'")
    common.add_argument("--table", help="explicit Q rows 'Q(0,0),Q(0,1),...;Q(1,0),...'")
    common.add_argument("--out", help="write a JSON report to this path")
    common.add_argument("--budget", type=int, help="top-simplex budget for products")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="ihk", description="Intersection homology of filtered simplicial complexes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, *spaces, **extra):
        sp = sub.add_parser(name, parents=[common])
        for s in spaces:
            sp.add_argument(f"--{s}", required=True)
        for flag, kw in extra.items():
            sp.add_argument(f"--{flag.replace('_', '-')}", **kw)
        sp.set_defaults(func=fn)
        return sp

    add("validate", cmd_validate, "space", print_space=dict(action="store_true"))
    add("homology", cmd_homology, "space")
    add("ih", cmd_ih, "space", relative=dict(help="subcomplex expression for relative groups"))
    add("link", cmd_link, "space", "vertex", print_space=dict(action="store_true"))
    add("cone-check", cmd_cone_check, "space")
    add("join-check", cmd_join_check, "l1", "l2")
    add("kunneth-check", cmd_kunneth_check, "x", "y")
    sp = add("super-counterexample", cmd_super)
    sp.set_defaults(x="s1", y="t2")
    sp.add_argument("--x", default="s1")
    sp.add_argument("--y", default="t2")
    add("explore", cmd_explore, "x", "y", shifts=dict(default="0,1,2"), max_jobs=dict(type=int, default=8))
    add("suite", cmd_suite, only=dict(help="comma separated criterion numbers"))
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    out = Output(args.out)
    try:
        code = args.func(args, out)
    except (SpaceError, PerversityError, BudgetExceeded, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.close()
    return code


if __name__ == "__main__":
    sys.exit(main())
