"""Closed-form predictions and the harness comparing them with computed homology."""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .exactalg import (
    FgModule,
    GradedModule,
    Ring,
    ZZ,
    direct_sum,
    kunneth_rhs,
    reduce_degree_zero,
    tensor,
    torsion_product,
)
from .ichain import CONSTANT_Z, CoefficientSpec, intersection_homology, relative_intersection_homology
from .perversity import (
    ConditionVerdict,
    Perversity,
    PerversityError,
    ProductPerversity,
    classify_conditions,
    make_product_perversity,
    normalize_super,
)
from .stratcomplex import FilteredComplex, cone, join, normal_link, product

DEFAULT_BUDGET = 10000
BUDGET_ENV = "IHK_BUDGET"

PerversityLike = Union[Perversity, int]


class BudgetExceeded(RuntimeError):
    pass


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


def product_size(X: FilteredComplex, Y: FilteredComplex) -> int:
    """Number of top simplices of the staircase product."""
    total = 0
    for s in X.facets:
        for t in Y.facets:
            a, b = len(s) - 1, len(t) - 1
            total += math.comb(a + b, a)
    return total


def check_budget(count: int, budget: Optional[int], what: str = "complex"):
    budget = default_budget() if budget is None else budget
    if count > budget:
        raise BudgetExceeded(
            f"{what} has {count} top simplices, over the budget of {budget} (raise --budget or {BUDGET_ENV})"
        )


def guarded_product(X, Y, budget: Optional[int] = None) -> FilteredComplex:
    check_budget(product_size(X, Y), budget, f"product({X.name},{Y.name})")
    return product(X, Y)


# ---------------------------------------------------------------------------
# Predictions


@dataclass(frozen=True)
class Prediction:
    module: GradedModule
    provenance: str


def _value(p: PerversityLike, n: int) -> int:
    return p if isinstance(p, int) else p(n)


def _truncate(H: GradedModule, below: int) -> GradedModule:
    return GradedModule(H.ring, tuple(H[i] for i in range(max(0, min(below, len(H))))))


def cone_prediction(H_L: GradedModule, n: int, p: PerversityLike, regime: str = "constant") -> Prediction:
    """Homology of the cone on an ``(n-1)``-dimensional link.

    Truncation below ``n - 1 - p(n)``; with constant coefficients and
    ``p(n) > n - 2`` a copy of ``R`` survives in degree 0.
    """
    pn = _value(p, n)
    out = _truncate(H_L, n - 1 - pn)
    if regime == "constant" and pn > n - 2:
        return Prediction(GradedModule(H_L.ring, (FgModule.build(H_L.ring, 1),)), "cone-super")
    return Prediction(out, "cone")


def relative_cone_prediction(H_L: GradedModule, n: int, p: PerversityLike, regime: str = "constant") -> Prediction:
    """``IH_i(cL, L) = IH_{i-1}(L)`` for ``i >= n - p(n)`` and 0 below (reduced in the super constant case)."""
    pn = _value(p, n)
    H = H_L
    tag = "relative-cone"
    if regime == "constant" and pn > n - 2:
        H = reduce_degree_zero(H_L) if H_L[0].rank else H_L
        tag = "relative-cone-super"
    start = max(0, n - pn)
    groups = {i: H[i - 1] for i in range(max(start, 1), len(H) + 1)}
    return Prediction(GradedModule.from_dict(H_L.ring, groups), tag)


def join_prediction(
    H1: GradedModule, H2: GradedModule, k: int, l: int, p: PerversityLike, q: PerversityLike
) -> Prediction:
    """Four-sum formula for the homology of the join of a codim-``k`` and a codim-``l`` link."""
    ring = H1.ring
    alpha = k - 1 - _value(p, k)
    beta = l - 1 - _value(q, l)
    top = len(H1) + len(H2) + 2
    groups = {}
    for i in range(top):
        terms = []
        for a in range(len(H1)):
            for b in range(len(H2)):
                low = a < alpha and b < beta
                high = a >= alpha and b >= beta
                if low and a + b == i:
                    terms.append(tensor(H1[a], H2[b]))
                if low and a + b == i - 1:
                    terms.append(torsion_product(H1[a], H2[b]))
                if high and a + b == i - 1:
                    terms.append(tensor(H1[a], H2[b]))
                if high and a + b == i - 2:
                    terms.append(torsion_product(H1[a], H2[b]))
        groups[i] = direct_sum(terms, ring)
    return Prediction(GradedModule.from_dict(ring, groups), "join")


def join_breakdown(
    H1: GradedModule, H2: GradedModule, k: int, l: int, p: PerversityLike, q: PerversityLike
) -> Prediction:
    """The same groups listed by degree range rather than by block."""
    ring = H1.ring
    pk, ql = _value(p, k), _value(q, l)
    c = k + l - pk - ql
    alpha, beta = k - 1 - pk, l - 1 - ql
    top = len(H1) + len(H2) + 2
    groups = {}
    for i in range(top):
        if i >= c:
            terms = [tensor(H1[a], H2[i - 1 - a]) for a in range(alpha, i) if i - 1 - a >= beta]
            terms += [torsion_product(H1[a], H2[i - 2 - a]) for a in range(alpha, i) if i - 2 - a >= beta]
        elif i == c - 1:
            terms = [tensor(H1[alpha], H2[beta])] if alpha >= 0 and beta >= 0 else []
        elif i == c - 2:
            terms = []
        elif i == c - 3:
            terms = [torsion_product(H1[alpha - 1], H2[beta - 1])] if alpha >= 1 and beta >= 1 else []
        else:
            terms = [tensor(H1[a], H2[i - a]) for a in range(0, min(i + 1, alpha)) if i - a < beta]
            terms += [torsion_product(H1[a], H2[i - 1 - a]) for a in range(0, min(i, alpha)) if 0 <= i - 1 - a < beta]
        groups[i] = direct_sum(terms, ring)
    return Prediction(GradedModule.from_dict(ring, groups), "breakdown")


def kunneth_prediction(H1: GradedModule, H2: GradedModule) -> Prediction:
    return Prediction(kunneth_rhs(H1, H2), "kunneth-rhs")


# ---------------------------------------------------------------------------
# Reports


@dataclass
class DegreeRow:
    degree: int
    computed: FgModule
    predicted: FgModule

    @property
    def match(self) -> bool:
        return self.computed == self.predicted


@dataclass
class LocalComparison:
    cell: Tuple[int, int]
    computed: GradedModule
    predicted: GradedModule
    first_mismatch: Optional[int]


@dataclass
class VerificationReport:
    name: str
    rows: List[DegreeRow]
    provenance: str
    verdict: Optional[ConditionVerdict] = None
    wall_time: float = 0.0
    notes: List[str] = field(default_factory=list)
    local: List[LocalComparison] = field(default_factory=list)

    @property
    def match(self) -> bool:
        return all(r.match for r in self.rows)

    @property
    def passed(self) -> bool:
        return self.match

    @property
    def first_mismatch(self) -> Optional[int]:
        bad = [r.degree for r in self.rows if not r.match]
        return bad[0] if bad else None

    @property
    def outcome(self) -> str:
        if self.match:
            return "PASS" if self.guaranteed else "PASS (conditions not guaranteed)"
        return "MISMATCH (unexpected)" if self.guaranteed else "MISMATCH (theorem-predicted)"

    @property
    def guaranteed(self) -> bool:
        return self.verdict is None or self.verdict.passed

    @property
    def theorem_predicted(self) -> bool:
        """Match with the hypotheses satisfied, or mismatch with them violated."""
        return self.match == self.guaranteed

    @property
    def consistent(self) -> bool:
        """Only a mismatch under satisfied hypotheses contradicts the theorem."""
        return self.match or not self.guaranteed

    def computed(self) -> GradedModule:
        return GradedModule(self.rows[0].computed.ring, tuple(r.computed for r in self.rows)) if self.rows else None

    def to_text(self) -> str:
        lines = [f"{self.name}: {self.outcome}  [{self.provenance}, {self.wall_time:.2f}s]"]
        for r in self.rows:
            mark = "ok" if r.match else "MISMATCH"
            lines.append(f"  H_{r.degree}: computed {r.computed}  predicted {r.predicted}  {mark}")
        if self.verdict is not None:
            lines.append("  " + self.verdict.summary().replace("\n", "\n  "))
        for loc in self.local:
            where = "agree" if loc.first_mismatch is None else f"differ at degree {loc.first_mismatch}"
            lines.append(
                f"  local cell {loc.cell}: cone on join {loc.computed} vs product of cones {loc.predicted}: {where}"
            )
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "outcome": self.outcome,
            "match": self.match,
            "provenance": self.provenance,
            "wall_time": round(self.wall_time, 4),
            "degrees": [
                {"degree": r.degree, "computed": str(r.computed), "predicted": str(r.predicted), "match": r.match}
                for r in self.rows
            ],
            "notes": list(self.notes),
        }
        if self.verdict is not None:
            out["conditions"] = {
                "status": self.verdict.status,
                "cells": {
                    f"{k},{l}": {
                        "tag": self.verdict.tag(k, l),
                        "shift": c.shift,
                        "tor": None if c.tor is None else str(c.tor),
                    }
                    for (k, l), c in sorted(self.verdict.cells.items())
                },
            }
        if self.local:
            out["local"] = [
                {
                    "cell": list(loc.cell),
                    "computed": str(loc.computed),
                    "predicted": str(loc.predicted),
                    "first_mismatch": loc.first_mismatch,
                }
                for loc in self.local
            ]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def compare(name: str, computed: GradedModule, predicted: Prediction, **kw) -> VerificationReport:
    n = max(len(computed), len(predicted.module), 1)
    rows = [DegreeRow(i, computed[i], predicted.module[i]) for i in range(n)]
    return VerificationReport(name, rows, predicted.provenance, **kw)


def _first_diff(a: GradedModule, b: GradedModule) -> Optional[int]:
    for i in range(max(len(a), len(b))):
        if a[i] != b[i]:
            return i
    return None


# ---------------------------------------------------------------------------
# Verifications


def verify_cone(
    L: FilteredComplex, p: Perversity, coeff: CoefficientSpec = CONSTANT_Z
) -> Tuple[VerificationReport, VerificationReport]:
    """Absolute and relative groups of ``cL`` against the cone formulas."""
    t0 = time.perf_counter()
    n = L.dim + 1
    cL = cone(L)
    H_L = intersection_homology(L, p, coeff)
    abs_rep = compare(
        f"IH(cone({L.name}); p({n})={p(n)}, {coeff})",
        intersection_homology(cL, p, coeff),
        cone_prediction(H_L, n, p, coeff.regime),
    )
    rel_rep = compare(
        f"IH(cone({L.name}), {L.name}; p({n})={p(n)}, {coeff})",
        relative_intersection_homology(cL, L, p, coeff),
        relative_cone_prediction(H_L, n, p, coeff.regime),
    )
    dt = time.perf_counter() - t0
    abs_rep.wall_time = rel_rep.wall_time = dt
    return abs_rep, rel_rep


def verify_join(
    L1: FilteredComplex, L2: FilteredComplex, p: Perversity, q: Perversity, Q: ProductPerversity,
    coeff: CoefficientSpec = CONSTANT_Z,
) -> VerificationReport:
    t0 = time.perf_counter()
    k, l = L1.dim + 1, L2.dim + 1
    J = join(L1, L2)
    H1 = intersection_homology(L1, p, coeff)
    H2 = intersection_homology(L2, q, coeff)
    rep = compare(
        f"IH(join({L1.name},{L2.name}); {coeff})",
        intersection_homology(J, Q, coeff),
        join_prediction(H1, H2, k, l, p, q),
    )
    alt = join_breakdown(H1, H2, k, l, p, q).module
    if _first_diff(alt, join_prediction(H1, H2, k, l, p, q).module) is not None:
        rep.notes.append(f"block form and range form of the join formula disagree: {alt}")
    rep.wall_time = time.perf_counter() - t0
    return rep


def _stratum_vertices(X: FilteredComplex) -> Dict[int, List[int]]:
    out: Dict[int, List[int]] = {}
    for v in range(X.num_vertices):
        out.setdefault(X.codim(v), []).append(v)
    return out


def _links(X: FilteredComplex, k: int, limit: int = 4) -> List[FilteredComplex]:
    """Normal links at a few vertices of codimension ``k``."""
    verts = _stratum_vertices(X).get(k, [])
    return [normal_link(X, v) for v in verts[:limit]]


def _distinct(mods) -> List[GradedModule]:
    out: List[GradedModule] = []
    for m in mods:
        if m not in out:
            out.append(m)
    return out


def link_homologies(
    X: FilteredComplex, Y: FilteredComplex, p: Perversity, q: Perversity, coeff: CoefficientSpec,
    cells: Sequence[Tuple[int, int]],
) -> Dict[Tuple[str, int], List[GradedModule]]:
    data: Dict[Tuple[str, int], List[GradedModule]] = {}
    for k, l in cells:
        if ("p", k) not in data:
            data[("p", k)] = _distinct(intersection_homology(L, p, coeff) for L in _links(X, k))
        if ("q", l) not in data:
            data[("q", l)] = _distinct(intersection_homology(L, q, coeff) for L in _links(Y, l))
    return data


def product_verdict(
    X: FilteredComplex, Y: FilteredComplex, p: Perversity, q: Perversity, Q: ProductPerversity,
    coeff: CoefficientSpec = CONSTANT_Z,
) -> ConditionVerdict:
    occ = (X.occupied_codims(), Y.occupied_codims())
    pc, qc = normalize_super(p), normalize_super(q)
    need = []
    if not coeff.ring.is_field:
        for k in occ[0]:
            for l in occ[1]:
                if k and l and k <= Q.m and l <= Q.n and Q(k, l) - pc(k) - qc(l) == 2:
                    need.append((k, l))
    links = link_homologies(X, Y, p, q, coeff, need)
    return classify_conditions(p, q, Q, links, coeff.ring, occupied=occ)


def local_comparison(
    X: FilteredComplex, Y: FilteredComplex, p: Perversity, q: Perversity, Q: ProductPerversity,
    k: int, l: int, coeff: CoefficientSpec = CONSTANT_Z,
) -> LocalComparison:
    """Cone on the join of the links at cell ``(k, l)`` against the product of the cones."""
    L1, L2 = _links(X, k, 1)[0], _links(Y, l, 1)[0]
    lhs = intersection_homology(cone(join(L1, L2)), Q, coeff)
    rhs = kunneth_rhs(intersection_homology(cone(L1), p, coeff), intersection_homology(cone(L2), q, coeff))
    return LocalComparison((k, l), lhs, rhs, _first_diff(lhs, rhs))


def verify_kunneth(
    X: FilteredComplex, Y: FilteredComplex, p: Perversity, q: Perversity, Q: ProductPerversity,
    coeff: CoefficientSpec = CONSTANT_Z, budget: Optional[int] = None, localize: bool = True,
) -> VerificationReport:
    t0 = time.perf_counter()
    if coeff.regime == "saralegi":
        raise PerversityError("products are computed with constant or r0 coefficients only")
    Z = guarded_product(X, Y, budget)
    lhs = intersection_homology(Z, Q, coeff)
    rhs = kunneth_prediction(intersection_homology(X, p, coeff), intersection_homology(Y, q, coeff))
    verdict = product_verdict(X, Y, p, q, Q, coeff)
    rep = compare(f"IH^Q({X.name} x {Y.name}; {coeff}, {Q.mode})", lhs, rhs, verdict=verdict)
    if localize and (not rep.match or not verdict.passed):
        for c in verdict.failures():
            if c.k and c.l:
                rep.local.append(local_comparison(X, Y, p, q, Q, c.k, c.l, coeff))
        if not rep.match and not verdict.failures():
            rep.notes.append("mismatch without a failed condition cell")
    rep.wall_time = time.perf_counter() - t0
    return rep


@dataclass
class CounterexampleReport:
    shift2: VerificationReport
    shift0: VerificationReport
    witness_degree: Optional[int]

    @property
    def conclusive(self) -> bool:
        return self.witness_degree is not None

    @property
    def passed(self) -> bool:
        """The shift-2 table fails and the shift-0 table succeeds."""
        return (not self.shift2.match) and self.shift0.match

    def to_text(self) -> str:
        status = "counterexample confirmed" if self.passed else (
            "inconclusive example" if self.shift0.match and self.shift2.match else "unexpected outcome"
        )
        return "\n".join([f"super counterexample: {status}", self.shift2.to_text(), self.shift0.to_text()])

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "witness_degree": self.witness_degree,
            "shift2": self.shift2.to_dict(),
            "shift0": self.shift0.to_dict(),
        }


def verify_super_counterexample(
    X: FilteredComplex, Y: FilteredComplex, p: Perversity, q: Perversity, ring: Ring = ZZ,
    budget: Optional[int] = None,
) -> CounterexampleReport:
    """``Z = cX x cY`` with ``Q(k, l) = p(k) + q(l) + 2`` at the apex pair, constant coefficients."""
    k, l = X.dim + 1, Y.dim + 1
    p = normalize_super(p)
    if p(k) != k - 1:
        raise PerversityError(f"need p({k}) = {k - 1} after normalisation, got {p(k)}")
    if q(l) > l - 3:
        raise PerversityError(f"need q({l}) <= {l - 3}, got {q(l)}")
    cX, cY = cone(X), cone(Y)
    coeff = CoefficientSpec(ring, "constant")
    Q2 = make_product_perversity("shift", p, q, shifts={(k, l): 2}, m=k, n=l)
    Q0 = make_product_perversity("shift", p, q, shifts=0, m=k, n=l)
    r2 = verify_kunneth(cX, cY, p, q, Q2, coeff, budget, localize=False)
    r0 = verify_kunneth(cX, cY, p, q, Q0, coeff, budget, localize=False)
    return CounterexampleReport(r2, r0, r2.first_mismatch)


def explore_shifts(
    X: FilteredComplex, Y: FilteredComplex, p: Perversity, q: Perversity,
    coeff: CoefficientSpec = CONSTANT_Z, shifts: Sequence[int] = (0, 1, 2), max_jobs: int = 8,
    budget: Optional[int] = None,
) -> List[Tuple[int, VerificationReport]]:
    """Uniform shift tables: observed match against the theorem's verdict."""
    if len(shifts) > max_jobs:
        raise BudgetExceeded(f"{len(shifts)} shift tables requested, cap is {max_jobs}")
    out = []
    for s in shifts:
        Q = make_product_perversity("shift", p, q, shifts=s, m=X.dim, n=Y.dim)
        out.append((s, verify_kunneth(X, Y, p, q, Q, coeff, budget, localize=False)))
    return out
