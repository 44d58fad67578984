"""Intersection chain complexes of filtered simplicial complexes.

All chain groups are sublattices of the simplicial chain groups, stored as
echelon bases of sparse vectors indexed by simplex position.  Over ``Z`` and
``Q`` integer arithmetic is used (``Q`` is flat over ``Z`` and the lattices
are saturated); over ``Z/p`` everything is reduced mod ``p``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .exactalg import (
    ZZ,
    BoundedChainComplex,
    EchelonBasis,
    GradedModule,
    Ring,
    SparseMatrix,
    _reduce_vec,
    homology_of_complex,
    sparse_kernel,
)
from .perversity import Perversity, PerversityError, ProductPerversity
from .stratcomplex import FilteredComplex, Simplex, face_signs

log = logging.getLogger(__name__)

AnyPerversity = Union[Perversity, ProductPerversity]
SparseVector = Dict[int, int]

REGIMES = {"constant": "constant", "r0": "r0", "stratified-zero": "r0", "saralegi": "saralegi"}


@dataclass(frozen=True)
class CoefficientSpec:
    ring: Ring = ZZ
    regime: str = "constant"

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown coefficient regime {self.regime!r}")
        object.__setattr__(self, "regime", REGIMES[self.regime])

    def __str__(self):
        return f"{self.ring}" if self.regime == "constant" else f"{self.ring}[{self.regime}]"


CONSTANT_Z = CoefficientSpec()


@dataclass
class AuditTally:
    count: int = 0
    failures: int = 0


AUDITS = AuditTally()


# ---------------------------------------------------------------------------
# Allowability


@dataclass
class AllowabilityEntry:
    simplex: Simplex
    allowed: bool
    binding: Optional[Tuple[int, ...]]
    slack: Optional[int]


def simplex_allowable(
    X: FilteredComplex, P: AnyPerversity, simplex: Sequence[int], bump: int = 0
) -> AllowabilityEntry:
    """Check ``dim(s^-1(S)) <= i - codim S + P(S)`` for every stratum ``S`` met by ``s``.

    ``binding`` is the stratum with the smallest slack.
    """
    s = tuple(sorted(simplex))
    if s not in X:
        raise ValueError(f"{s} is not a simplex")
    i = len(s) - 1
    best = None
    for lam, d in X.stratum_dims(s).items():
        slack = i - sum(lam) + P.value(lam) + bump - d
        if best is None or slack < best[1]:
            best = (lam, slack)
    return AllowabilityEntry(s, best[1] >= 0, best[0], best[1])


class _AllowCache:
    """Allowability depends only on the multiset of vertex labels; memoise on it."""

    def __init__(self, X: FilteredComplex, P: AnyPerversity, bump: int = 0):
        self.X, self.P, self.bump = X, P, bump
        self.memo: Dict[tuple, bool] = {}

    def __call__(self, s: Simplex) -> bool:
        labs = self.X.labels
        key = tuple(sorted(labs[v] for v in s))
        hit = self.memo.get(key)
        if hit is None:
            i = len(s) - 1
            dims = self.X.stratum_dims(s)
            hit = all(d <= i - sum(lam) + self.P.value(lam) + self.bump for lam, d in dims.items())
            self.memo[key] = hit
        return hit


def _check_table(X: FilteredComplex, P: AnyPerversity):
    for lam in X.occupied_labels:
        try:
            P.value(lam)
        except PerversityError as exc:
            raise PerversityError(f"{exc} (stratum {lam} of {X.name or 'space'})") from None


def _alive(X: FilteredComplex, regime: str) -> List[List[bool]]:
    if regime == "r0":
        labs = X.labels
        return [[any(not any(labs[v]) for v in s) for s in layer] for layer in X.simplices]
    return [[True] * len(layer) for layer in X.simplices]


# ---------------------------------------------------------------------------
# Lattice machinery


def _boundary(X: FilteredComplex, d: int, vec: SparseVector, alive, p) -> SparseVector:
    out: SparseVector = {}
    if d == 0:
        return out
    layer = X.simplices[d]
    idx = X.index[d - 1]
    live = alive[d - 1]
    for j, c in vec.items():
        for f, sgn in face_signs(layer[j]):
            r = idx[f]
            if live[r]:
                out[r] = out.get(r, 0) + sgn * c
    return _reduce_vec(out, p)


def _allowable_bases(X: FilteredComplex, allowed: List[List[bool]], alive, p) -> List[EchelonBasis]:
    """Echelon bases of ``span(allowed_i) cap d^-1 span(allowed_{i-1})``.

    Allowed simplices whose live faces are all allowed are basis vectors on
    their own; the rest contribute the saturated kernel of their boundary
    projected onto the non-allowed faces.
    """
    bases = []
    for d, layer in enumerate(X.simplices):
        good, bad, cols = [], [], []
        idx = X.index[d - 1] if d else None
        for j, s in enumerate(layer):
            if not allowed[d][j]:
                continue
            col = {}
            if d:
                for f, sgn in face_signs(s):
                    r = idx[f]
                    if alive[d - 1][r] and not allowed[d - 1][r]:
                        col[r] = sgn
            if col:
                bad.append(j)
                cols.append(col)
            else:
                good.append(j)
        eb = EchelonBasis.of_units(good, p)
        if bad:
            for kv in sparse_kernel(cols, p):
                eb.add({bad[t]: c for t, c in kv.items()})
        bases.append(eb)
    return bases


def _complex_of(X, bases: List[EchelonBasis], alive, p, ring) -> BoundedChainComplex:
    sizes = [len(b) for b in bases]
    bounds = [SparseMatrix(0, sizes[0] if sizes else 0)]
    for d in range(1, len(bases)):
        cols = [bases[d - 1].solve(_boundary(X, d, v, alive, p)) for v in bases[d].vectors]
        bounds.append(SparseMatrix(sizes[d - 1], sizes[d], cols))
    return BoundedChainComplex(ring, sizes, bounds)


def _cone_of_inclusion(X, sub: List[EchelonBasis], amb: List[EchelonBasis], alive, p, ring) -> BoundedChainComplex:
    """Mapping cone of ``sub -> amb``; its homology is that of the quotient."""
    top = len(amb)
    a = [len(b) for b in amb] + [0]
    s = [len(b) for b in sub] + [0] * (top + 1 - len(sub))
    sizes = [a[d] + (s[d - 1] if d else 0) for d in range(top + 1)]
    bounds = [SparseMatrix(0, sizes[0])]
    for d in range(1, top + 1):
        cols = []
        if d < top:
            for v in amb[d].vectors:
                cols.append(amb[d - 1].solve(_boundary(X, d, v, alive, p)))
        off = a[d - 1]
        if d - 1 < len(sub):
            for v in sub[d - 1].vectors:
                col = dict(amb[d - 1].solve(v))
                if d - 1 > 0:
                    for r, c in sub[d - 2].solve(_boundary(X, d - 1, v, alive, p)).items():
                        col[off + r] = -c
                cols.append(_reduce_vec(col, p))
        bounds.append(SparseMatrix(sizes[d - 1], sizes[d], cols))
    while len(sizes) > 1 and sizes[-1] == 0:
        sizes.pop()
        bounds.pop()
    return BoundedChainComplex(ring, sizes, bounds)


# ---------------------------------------------------------------------------
# Public complexes


@dataclass
class IntersectionComplex:
    """Intersection chains of ``X`` and the chain complex computing their homology.

    For the constant and ``r0`` regimes ``complex`` is the intersection chain
    complex in the coordinates of ``basis``.  For Saralegi's complex it is
    the mapping cone of denominator into numerator (``basis`` and
    ``quotient_by`` hold their lattices), which has the homology of the
    quotient.
    """

    X: FilteredComplex
    perversity: AnyPerversity
    coeff: CoefficientSpec
    basis: List[EchelonBasis]
    complex: BoundedChainComplex
    allowed: List[List[bool]]
    alive: List[List[bool]]
    quotient_by: Optional[List[EchelonBasis]] = None
    audited: bool = False

    @property
    def p(self) -> Optional[int]:
        return self.coeff.ring.p

    def ranks(self) -> List[int]:
        return [len(b) for b in self.basis]

    def homology(self) -> GradedModule:
        return homology_of_complex(self.complex, check=False)

    def audit(self) -> bool:
        """``dd = 0`` and every basis chain and its boundary are supported on allowed simplices."""
        AUDITS.count += 1
        try:
            self._audit()
        except AssertionError:
            AUDITS.failures += 1
            raise
        self.audited = True
        return True

    def _audit(self) -> None:
        if not self.complex.check_dd_zero():
            raise AssertionError("intersection complex: dd != 0")
        lattices = [self.basis] + ([self.quotient_by] if self.quotient_by else [])
        for bases in lattices:
            for d, eb in enumerate(bases):
                for v in eb.vectors:
                    if not all(self.allowed[d][j] for j in v):
                        raise AssertionError(f"non-allowable support in degree {d}")
                    bd = _boundary(self.X, d, v, self.alive, self.p)
                    if not all(self.allowed[d - 1][j] for j in bd):
                        raise AssertionError(f"non-allowable boundary in degree {d}")


def _allowed_lists(X, P, alive, bump=0) -> List[List[bool]]:
    ok = _AllowCache(X, P, bump)
    return [[alive[d][j] and ok(s) for j, s in enumerate(layer)] for d, layer in enumerate(X.simplices)]


def intersection_complex(
    X: FilteredComplex, P: AnyPerversity, coeff: CoefficientSpec = CONSTANT_Z, audit: bool = True
) -> IntersectionComplex:
    if coeff.regime == "saralegi":
        return saralegi_complex(X, P, coeff.ring, audit=audit)
    _check_table(X, P)
    p = coeff.ring.p
    alive = _alive(X, coeff.regime)
    allowed = _allowed_lists(X, P, alive)
    bases = _allowable_bases(X, allowed, alive, p)
    C = _complex_of(X, bases, alive, p, coeff.ring)
    ic = IntersectionComplex(X, P, coeff, bases, C, allowed, alive)
    if audit:
        ic.audit()
    return ic


def bad_closure(X: FilteredComplex, p: AnyPerversity) -> List[List[bool]]:
    """Membership in the closure of the singular strata with ``p(S) > codim S - 2``."""
    marks = [[False] * len(layer) for layer in X.simplices]
    for d in range(len(X.simplices) - 1, -1, -1):
        for j, s in enumerate(X.simplices[d]):
            if marks[d][j]:
                continue
            lam = X.point_label(s)
            k = sum(lam)
            if k > 0 and p.value(lam) > k - 2:
                marks[d][j] = True
        if d:
            idx = X.index[d - 1]
            for j, s in enumerate(X.simplices[d]):
                if marks[d][j]:
                    for f, _ in face_signs(s):
                        marks[d - 1][idx[f]] = True
    return marks


def saralegi_complex(
    X: FilteredComplex, p: AnyPerversity, ring: Ring = ZZ, audit: bool = True
) -> IntersectionComplex:
    """Saralegi's relative complex, realised as a mapping cone.

    Numerator: chains on ``p``-allowable simplices plus ``(p+1)``-allowable
    simplices of the bad closure, with boundary of the same kind.
    Denominator: the same for the bad-closure part alone.
    """
    if isinstance(p, ProductPerversity):
        raise ValueError("Saralegi's complex is only built for a single perversity")
    _check_table(X, p)
    q = ring.p
    alive = _alive(X, "constant")
    base = _allowed_lists(X, p, alive)
    plus = _allowed_lists(X, p, alive, bump=1)
    bad = bad_closure(X, p)
    extra = [[bad[d][j] and plus[d][j] for j in range(len(layer))] for d, layer in enumerate(X.simplices)]
    numer_ok = [[base[d][j] or extra[d][j] for j in range(len(layer))] for d, layer in enumerate(X.simplices)]
    numer = _allowable_bases(X, numer_ok, alive, q)
    denom = _allowable_bases(X, extra, alive, q)
    C = _cone_of_inclusion(X, denom, numer, alive, q, ring)
    ic = IntersectionComplex(X, p, CoefficientSpec(ring, "saralegi"), numer, C, numer_ok, alive, denom)
    if audit:
        ic.audit()
    return ic


def intersection_homology(
    X: FilteredComplex, P: AnyPerversity, coeff: CoefficientSpec = CONSTANT_Z
) -> GradedModule:
    return intersection_complex(X, P, coeff).homology()


# ---------------------------------------------------------------------------
# Relative groups


def _embedding(X: FilteredComplex, A: FilteredComplex, vertex_map: Sequence[int]) -> List[List[int]]:
    emb = []
    for d, layer in enumerate(A.simplices):
        row = []
        for s in layer:
            t = tuple(sorted(vertex_map[v] for v in s))
            if t not in X:
                raise ValueError(f"{A.name or 'A'} is not a subcomplex: {t} missing")
            row.append(X.index[d][t])
        emb.append(row)
    for v, w in enumerate(vertex_map):
        if A.labels[v] != X.labels[w]:
            raise ValueError("subcomplex must carry the inherited filtration")
    return emb


def _push(eb: EchelonBasis, emb_row: List[int]) -> List[SparseVector]:
    return [{emb_row[j]: c for j, c in v.items()} for v in eb.vectors]


def relative_intersection_homology(
    X: FilteredComplex,
    A: Union[FilteredComplex, Iterable[int]],
    P: AnyPerversity,
    coeff: CoefficientSpec = CONSTANT_Z,
    vertex_map: Optional[Sequence[int]] = None,
) -> GradedModule:
    """``IH(X, A)``: homology of intersection chains of ``X`` modulo those supported in ``A``.

    ``A`` is a subcomplex whose vertex ``v`` is vertex ``vertex_map[v]`` of
    ``X`` (identity by default), or an iterable of vertices of ``X``
    spanning a full subcomplex.
    """
    if not isinstance(A, FilteredComplex):
        verts = sorted(set(A))
        A = X.subcomplex(verts)
        vertex_map = verts
    if vertex_map is None:
        vertex_map = list(range(A.num_vertices))
    emb = _embedding(X, A, vertex_map)
    icx = intersection_complex(X, P, coeff)
    ica = intersection_complex(A, P, coeff)
    q = coeff.ring.p
    top = len(X.simplices)
    if coeff.regime == "saralegi":
        # (N_X / D_X) / (N_A / D_A) = N_X / (D_X + N_A)
        sub = []
        for d in range(top):
            eb = EchelonBasis(q)
            for v in icx.quotient_by[d].vectors:
                eb.add(v)
            if d < len(ica.basis):
                for v in _push(ica.basis[d], emb[d]):
                    eb.add(v)
            sub.append(eb)
    else:
        sub = []
        for d in range(top):
            eb = EchelonBasis(q)
            if d < len(ica.basis):
                for v in _push(ica.basis[d], emb[d]):
                    eb.add(v)
            sub.append(eb)
    C = _cone_of_inclusion(X, sub, icx.basis, icx.alive, q, coeff.ring)
    return homology_of_complex(C)


# ---------------------------------------------------------------------------
# Cross products


Chain = Dict[Simplex, int]


def _shuffles(a: int, b: int):
    """Staircase paths with the sign of the corresponding (a, b)-shuffle."""
    import itertools

    for xs in itertools.combinations(range(a + b), a):
        sign = (-1) ** (sum(xs) - a * (a - 1) // 2)
        i = j = 0
        path = [(0, 0)]
        xset = set(xs)
        for step in range(a + b):
            if step in xset:
                i += 1
            else:
                j += 1
            path.append((i, j))
        yield sign, path


def simplex_cross(s: Simplex, t: Simplex, ny: int) -> Chain:
    out: Chain = {}
    for sign, path in _shuffles(len(s) - 1, len(t) - 1):
        out[tuple(s[i] * ny + t[j] for i, j in path)] = sign
    return out


def cross_chain(
    xi: Mapping[Simplex, int],
    eta: Mapping[Simplex, int],
    X: FilteredComplex,
    Y: FilteredComplex,
    p: Optional[Perversity] = None,
    q: Optional[Perversity] = None,
    Q: Optional[ProductPerversity] = None,
) -> Chain:
    """Eilenberg-Zilber cross product of simplicial chains, on the staircase triangulation.

    ``d(xi x eta) = d(xi) x eta + (-1)^{deg xi} xi x d(eta)``.  When
    perversities are given, ``Q >= p + q`` is required.
    """
    if Q is not None and p is not None and q is not None:
        for k in range(Q.m + 1):
            for l in range(Q.n + 1):
                if k <= p.max_codim and l <= q.max_codim and Q(k, l) < p(k) + q(l):
                    raise PerversityError(f"Q({k},{l}) = {Q(k, l)} is below p(k) + q(l)")
    ny = Y.num_vertices
    out: Chain = {}
    for s, a in xi.items():
        for t, b in eta.items():
            for u, sign in simplex_cross(tuple(s), tuple(t), ny).items():
                out[u] = out.get(u, 0) + sign * a * b
    return {u: c for u, c in out.items() if c}


def chain_boundary(chain: Mapping[Simplex, int]) -> Chain:
    out: Chain = {}
    for s, c in chain.items():
        for f, sgn in face_signs(tuple(s)):
            out[f] = out.get(f, 0) + sgn * c
    return {u: c for u, c in out.items() if c}


def chain_is_allowable(X: FilteredComplex, P: AnyPerversity, chain: Mapping[Simplex, int]) -> bool:
    ok = _AllowCache(X, P)
    return all(ok(tuple(s)) for s, c in chain.items() if c) and all(ok(f) for f in chain_boundary(chain))


def basis_chains(ic: IntersectionComplex, d: int) -> List[Chain]:
    layer = ic.X.simplices[d]
    return [{layer[j]: c for j, c in v.items()} for v in ic.basis[d].vectors]
