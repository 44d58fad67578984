"""The verification battery run by ``ihk suite``."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional

from . import ichain
from .exactalg import (
    GF,
    QQ,
    ZZ,
    FgModule,
    GradedModule,
    determinant,
    kunneth_rhs,
    matmul,
    smith_normal_form,
    tensor,
    torsion_product,
)
from .ichain import CoefficientSpec, intersection_homology, relative_intersection_homology
from .library import BUILTINS, LINK_LIBRARY, parse_expression
from .oracle import (
    explore_shifts,
    local_comparison,
    verify_cone,
    verify_join,
    verify_kunneth,
    verify_super_counterexample,
)
from .perversity import Perversity, make_product_perversity, normalize_super, preset
from .stratcomplex import barycentric_subdivision, ordinary_homology, product

RINGS = (ZZ, QQ, GF(2), GF(3))


@dataclass
class CaseResult:
    criterion: int
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] C{self.criterion} {self.name}" + (
            f": {self.detail}" if self.detail else ""
        )


def cone_perversity(n: int, value: int) -> Perversity:
    return Perversity(tuple([0] * n + [value]))


def _timed(criterion: int, name: str, fn: Callable[[], tuple]) -> CaseResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CaseResult(criterion, name, ok, detail, time.perf_counter() - t0)


def criterion_1() -> Iterable[CaseResult]:
    for lname in LINK_LIBRARY:
        L = BUILTINS[lname]()
        n = L.dim + 1
        for pn in range(0, n - 1):
            p = cone_perversity(n, pn)
            regimes = [CoefficientSpec(r) for r in RINGS]
            regimes += [CoefficientSpec(ZZ, "r0"), CoefficientSpec(ZZ, "saralegi")]
            for coeff in regimes:
                def run(L=L, p=p, coeff=coeff):
                    a, r = verify_cone(L, p, coeff)
                    return a.match and r.match, f"{a.computed()} / rel {r.computed()}"

                yield _timed(1, f"cone({lname}) p({n})={pn} {coeff}", run)


def criterion_2() -> Iterable[CaseResult]:
    for lname in LINK_LIBRARY:
        L = BUILTINS[lname]()
        n = L.dim + 1
        for pn in (n - 1, n, n + 5):
            p = cone_perversity(n, pn)
            for regime in ("constant", "r0", "saralegi"):
                coeff = CoefficientSpec(ZZ, regime)

                def run(L=L, p=p, coeff=coeff):
                    a, r = verify_cone(L, p, coeff)
                    return a.match and r.match, f"{a.computed()} / rel {r.computed()}"

                yield _timed(2, f"cone({lname}) p({n})={pn} {coeff}", run)

            def agree(L=L, p=p):
                from .stratcomplex import cone

                cL = cone(L)
                r0, sa = CoefficientSpec(ZZ, "r0"), CoefficientSpec(ZZ, "saralegi")
                a = intersection_homology(cL, p, r0) == intersection_homology(cL, p, sa)
                b = relative_intersection_homology(cL, L, p, r0) == relative_intersection_homology(cL, L, p, sa)
                return a and b, ""

            yield _timed(2, f"cone({lname}) p({n})={pn} r0 == saralegi", agree)


NORMALIZATION_SPACES = ("susp(rp2)", "cone(t2)", "product(cone(s1),cone(s1))")


def random_loose(n: int, rng: random.Random) -> Perversity:
    return Perversity(tuple([0] + [rng.randint(-2, k + 3) for k in range(1, n + 1)]))


def criterion_3(seed: int = 7) -> Iterable[CaseResult]:
    rng = random.Random(seed)
    for expr in NORMALIZATION_SPACES:
        X = parse_expression(expr)
        for _ in range(10):
            p = random_loose(X.dim, rng)

            def run(X=X, p=p):
                a, b = intersection_homology(X, p), intersection_homology(X, normalize_super(p))
                return a == b, f"{a}"

            yield _timed(3, f"{expr} p={p}", run)


JOIN_PAIRS = (("s1", "s1"), ("s1", "rp2"), ("rp2", "rp2"))


def criterion_4() -> Iterable[CaseResult]:
    for a, b in JOIN_PAIRS:
        L1, L2 = BUILTINS[a](), BUILTINS[b]()
        k, l = L1.dim + 1, L2.dim + 1
        for pk in range(0, k - 1):
            for ql in range(0, l - 1):
                p, q = cone_perversity(k, pk), cone_perversity(l, ql)
                for s in (0, 1, 2):
                    Q = make_product_perversity("shift", p, q, shifts=s, m=k, n=l)

                    def run(L1=L1, L2=L2, p=p, q=q, Q=Q, a=a, b=b, pk=pk, ql=ql):
                        rep = verify_join(L1, L2, p, q, Q)
                        ok = rep.match and not rep.notes
                        if (a, b) == ("rp2", "rp2") and pk == ql == 0:
                            ok = ok and FgModule.build(ZZ, 0, [2]) == rep.rows[3].computed
                        return ok, str(rep.computed())

                    yield _timed(4, f"join({a},{b}) p({k})={pk} q({l})={ql} shift {s}", run)


def _kunneth_case(name, x, y, p, q, Q, coeff, want_match=True) -> CaseResult:
    def run():
        X, Y = parse_expression(x), parse_expression(y)
        rep = verify_kunneth(X, Y, p, q, Q, coeff, localize=False)
        ok = rep.match == want_match and rep.theorem_predicted
        return ok, f"{rep.outcome}: {rep.computed()}"

    return _timed(5, name, run)


def criterion_5() -> Iterable[CaseResult]:
    z3 = Perversity((0, 0, 0))
    for s in (0, 1, 2):
        Q = make_product_perversity("shift", z3, z3, shifts=s)
        yield _kunneth_case(f"cone(s1) x cone(s1) shift {s}", "cone(s1)", "cone(s1)", z3, z3, Q, CoefficientSpec(ZZ))
    z4 = Perversity((0, 0, 0, 0))
    for s, ring in ((0, ZZ), (1, ZZ), (2, QQ), (2, GF(3))):
        Q = make_product_perversity("shift", z4, z4, shifts=s)
        yield _kunneth_case(f"susp(rp2) x susp(rp2) shift {s} over {ring}", "susp(rp2)", "susp(rp2)", z4, z4, Q,
                            CoefficientSpec(ring))
    for pname in ("zero", "upper-middle"):
        p = preset(pname, 3)
        Q = make_product_perversity("king", p, Perversity((0, 0, 0)), m=3, n=2)
        yield _kunneth_case(f"susp(rp2) x s2 king {pname}", "susp(rp2)", "s2", p, Perversity((0, 0, 0)), Q,
                            CoefficientSpec(ZZ))
    for pname, ring in (("lower-middle", QQ), ("upper-middle", ZZ)):
        p6 = preset(pname, 6)
        p3 = Perversity(p6.values[:4])
        Q = make_product_perversity("cgj", p6, m=3, n=3)
        yield _kunneth_case(f"susp(rp2) x susp(rp2) cgj {pname} over {ring}", "susp(rp2)", "susp(rp2)", p3, p3, Q,
                            CoefficientSpec(ring))


def criterion_6() -> Iterable[CaseResult]:
    def run_a():
        X = parse_expression("susp(rp2)")
        z4 = Perversity((0, 0, 0, 0))
        Q = make_product_perversity("shift", z4, z4, shifts={(3, 3): 2})
        rep = verify_kunneth(X, X, z4, z4, Q)
        cell = rep.verdict.cells[(3, 3)]
        loc = rep.local[0] if rep.local else local_comparison(X, X, z4, z4, Q, 3, 3)
        ok = (
            not rep.match
            and rep.theorem_predicted
            and not cell.ok
            and cell.tor == FgModule.build(ZZ, 0, [2])
            and loc.first_mismatch == 3
        )
        return ok, f"{rep.outcome}; local degree {loc.first_mismatch}; Tor {cell.tor}"

    yield _timed(6, "susp(rp2) x susp(rp2) shift 2 over Z", run_a)

    def run_b():
        r = verify_super_counterexample(BUILTINS["s1"](), BUILTINS["t2"](), Perversity((0, 0, 1)),
                                        Perversity((0, 0, 0, 0)))
        rows = r.shift2.rows
        ok = (
            r.passed
            and r.shift2.theorem_predicted
            and rows[1].predicted == FgModule.build(ZZ, 2)
            and rows[1].computed.is_zero
        )
        return ok, f"witness degree {r.witness_degree}"

    yield _timed(6, "cone(s1) x cone(t2) p(2)=1 q(3)=0 Q(2,3)=3", run_b)


def _random_matrix(rng, rows, cols, lo=-6, hi=6):
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def _random_module(rng) -> FgModule:
    return FgModule.build(ZZ, rng.randint(0, 2), [rng.choice([2, 3, 4, 6, 9, 12]) for _ in range(rng.randint(0, 2))])


def criterion_7(seed: int = 11) -> Iterable[CaseResult]:
    rng = random.Random(seed)

    def snf_checks():
        for _ in range(500):
            M = _random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
            U, D, V = smith_normal_form(M)
            if matmul(matmul(U, M), V) != D:
                return False, f"U M V != D for {M}"
            if abs(determinant(U)) != 1 or abs(determinant(V)) != 1:
                return False, f"non-unimodular transform for {M}"
            diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
            nz = [d for d in diag if d]
            if any(d < 0 for d in nz) or any(b % a for a, b in zip(nz, nz[1:])) or diag[: len(nz)] != nz:
                return False, f"bad diagonal {diag}"
        return True, "500 matrices"

    yield _timed(7, "Smith normal form properties", snf_checks)

    def tensor_checks():
        for _ in range(200):
            a, b, c = (_random_module(rng) for _ in range(3))
            if tensor(a, b) != tensor(b, a) or torsion_product(a, b) != torsion_product(b, a):
                return False, f"commutativity fails for {a}, {b}"
            if tensor(a + b, c) != tensor(a, c) + tensor(b, c):
                return False, f"tensor additivity fails for {a}, {b}, {c}"
            if torsion_product(a + b, c) != torsion_product(a, c) + torsion_product(b, c):
                return False, f"Tor additivity fails for {a}, {b}, {c}"
        return True, "200 triples"

    yield _timed(7, "tensor and Tor bilinearity/commutativity", tensor_checks)


MANIFOLD_PAIRS = (("s1", "s1"), ("s1", "rp2"), ("t2", "s2"))
SUBDIVISION_CASES = (
    ("cone(s1)", (0, 0, 0)),
    ("susp(rp2)", (0, 0, 0, 0)),
    ("susp(rp2)", (0, 0, 0, 1)),
    ("cone(t2)", (0, 0, 0, 0)),
    ("susp(2s1)", (0, 0, 1)),
)


def criterion_8() -> Iterable[CaseResult]:
    for a, b in MANIFOLD_PAIRS:
        def run(a=a, b=b):
            X, Y = BUILTINS[a](), BUILTINS[b]()
            lhs, rhs = ordinary_homology(product(X, Y)), kunneth_rhs(ordinary_homology(X), ordinary_homology(Y))
            return lhs == rhs, str(lhs)

        yield _timed(8, f"H({a} x {b}) Kunneth", run)
    for expr, vals in SUBDIVISION_CASES:
        def run(expr=expr, vals=vals):
            X = parse_expression(expr)
            p = Perversity(vals)
            a, b = intersection_homology(X, p), intersection_homology(barycentric_subdivision(X), p)
            return a == b, str(a)

        yield _timed(8, f"sd invariance {expr} p={Perversity(vals)}", run)

    def audits():
        before = ichain.AUDITS.count
        X = parse_expression("susp(rp2)")
        for vals in ((0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 0, 2)):
            for regime in ("constant", "r0", "saralegi"):
                ichain.intersection_complex(X, Perversity(vals), CoefficientSpec(ZZ, regime))
        return ichain.AUDITS.failures == 0, f"{ichain.AUDITS.count - before} complexes audited"

    yield _timed(8, "dd = 0 and allowability audits", audits)


CRITERIA: Dict[int, Callable[[], Iterable[CaseResult]]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}


def run_suite(only: Optional[Iterable[int]] = None, progress: Optional[Callable[[CaseResult], None]] = None) -> List[CaseResult]:
    out = []
    for c in sorted(only or CRITERIA):
        for res in CRITERIA[c]():
            if progress:
                progress(res)
            out.append(res)
    return out
