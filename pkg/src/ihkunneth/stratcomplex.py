"""Finite filtered simplicial complexes and filtration-aware constructions.

Vertices are the integers ``0 .. N-1``; the global vertex order is that
numbering and every sign convention derives from it.  A simplex is an
ascending tuple of vertices.

The filtration is recorded per vertex as a *codimension label*: a 1-tuple
``(k,)`` for an ordinary filtration (the vertex lies in ``X^{n-k}`` but not
``X^{n-k-1}``) and a pair ``(k, l)`` for the bifiltration of a product, where
the vertex lies in ``X_{m-k} x Y_{n-l}``.  Skeleta are the vertex-induced
(full) subcomplexes, so a point lies in the stratum whose label is the
componentwise minimum of the labels of the vertices spanning its carrier.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exactalg import ZZ, BoundedChainComplex, Ring, SparseMatrix

log = logging.getLogger(__name__)

Simplex = Tuple[int, ...]
Label = Tuple[int, ...]


def _closure(facets: Iterable[Simplex]) -> List[List[Simplex]]:
    seen = set()
    for f in facets:
        f = tuple(sorted(f))
        if f in seen:
            continue
        for r in range(1, len(f) + 1):
            seen.update(itertools.combinations(f, r))
    top = max((len(s) for s in seen), default=0)
    by_dim: List[List[Simplex]] = [[] for _ in range(top)]
    for s in seen:
        by_dim[len(s) - 1].append(s)
    for lst in by_dim:
        lst.sort()
    return by_dim


def label_min(labels: Iterable[Label]) -> Label:
    return tuple(min(vals) for vals in zip(*labels))


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """A simplicial complex with a vertex-labelled filtration of formal dimension ``dim``."""

    dim: int
    labels: Tuple[Label, ...]
    simplices: Tuple[Tuple[Simplex, ...], ...]
    names: Tuple[str, ...] = ()
    name: str = ""
    apex_label: Optional[Label] = None

    @classmethod
    def from_facets(
        cls,
        dim: int,
        labels: Sequence[Sequence[int]],
        facets: Iterable[Sequence[int]],
        names: Sequence[str] = (),
        name: str = "",
        apex_label: Optional[Label] = None,
    ) -> "FilteredComplex":
        labels = tuple(tuple(int(c) for c in lab) for lab in labels)
        widths = {len(lab) for lab in labels}
        if len(widths) > 1:
            raise ValueError("all vertex labels must have the same width")
        if any(c < 0 for lab in labels for c in lab):
            raise ValueError("negative codimension label")
        facets = [tuple(sorted(int(v) for v in f)) for f in facets if len(f)]
        for f in facets:
            if len(set(f)) != len(f):
                raise ValueError(f"repeated vertex in simplex {f}")
            if f and (f[0] < 0 or f[-1] >= len(labels)):
                raise ValueError(f"simplex {f} uses an unknown vertex")
        by_dim = _closure(list(facets) + [(v,) for v in range(len(labels))])
        if len(by_dim) - 1 > dim:
            raise ValueError(f"simplex of dimension {len(by_dim) - 1} exceeds formal dimension {dim}")
        names = tuple(names) if names else tuple(str(v) for v in range(len(labels)))
        cls_ = BifilteredComplex if widths == {2} else cls
        return cls_(dim, labels, tuple(tuple(s) for s in by_dim), names, name, apex_label)

    @classmethod
    def trivially_filtered(cls, dim: int, nverts: int, facets, name: str = "") -> "FilteredComplex":
        return cls.from_facets(dim, [(0,)] * nverts, facets, name=name)

    # -- basic data -------------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.labels)

    @property
    def width(self) -> int:
        return len(self.labels[0]) if self.labels else 1

    @property
    def top_dim(self) -> int:
        return len(self.simplices) - 1

    def simplices_of_dim(self, d: int) -> Tuple[Simplex, ...]:
        if 0 <= d < len(self.simplices):
            return self.simplices[d]
        return ()

    def all_simplices(self):
        for layer in self.simplices:
            yield from layer

    @cached_property
    def index(self) -> List[Dict[Simplex, int]]:
        return [{s: i for i, s in enumerate(layer)} for layer in self.simplices]

    def __contains__(self, simplex) -> bool:
        s = tuple(sorted(simplex))
        return 0 < len(s) <= len(self.simplices) and s in self.index[len(s) - 1]

    def f_vector(self) -> List[int]:
        return [len(layer) for layer in self.simplices]

    @cached_property
    def facets(self) -> List[Simplex]:
        covered = set()
        for layer in self.simplices[1:]:
            for s in layer:
                covered.update(itertools.combinations(s, len(s) - 1))
        return [s for s in self.all_simplices() if s not in covered]

    def codim(self, v: int) -> int:
        return sum(self.labels[v])

    def skeleton_index(self, v: int) -> int:
        return self.dim - self.codim(v)

    def point_label(self, simplex: Simplex) -> Label:
        """Label of the stratum containing the interior of ``simplex``."""
        return label_min(self.labels[v] for v in simplex)

    def stratum_dims(self, simplex: Simplex) -> Dict[Label, int]:
        """Dimension of the preimage of every open stratum meeting ``simplex``.

        With full skeleta the preimage of the stratum labelled ``lam`` is the
        face ``G`` spanned by vertices whose labels dominate ``lam``, minus
        the faces that miss the value ``lam[c]`` in some coordinate ``c``; it
        is nonempty (and of dimension ``dim G``) exactly when every
        coordinate value is attained inside ``G``.
        """
        labs = [self.labels[v] for v in simplex]
        w = len(labs[0])
        values = [sorted({lab[c] for lab in labs}) for c in range(w)]
        out = {}
        for lam in itertools.product(*values):
            g = [lab for lab in labs if all(lab[c] >= lam[c] for c in range(w))]
            if g and all(any(lab[c] == lam[c] for lab in g) for c in range(w)):
                out[lam] = len(g) - 1
        return out

    @cached_property
    def occupied_labels(self) -> List[Label]:
        found = set()
        for s in self.all_simplices():
            found.update(self.stratum_dims(s))
        return sorted(found)

    def occupied_codims(self) -> List[int]:
        return sorted({sum(lab) for lab in self.occupied_labels})

    def subcomplex(self, vertices: Iterable[int]) -> "FilteredComplex":
        """Full subcomplex on ``vertices`` with the inherited filtration, renumbered."""
        keep = sorted(set(vertices))
        new = {v: i for i, v in enumerate(keep)}
        facets = [tuple(new[v] for v in s) for s in self.all_simplices() if all(v in new for v in s)]
        return FilteredComplex.from_facets(
            self.dim,
            [self.labels[v] for v in keep],
            facets,
            [self.names[v] for v in keep],
            name=f"sub({self.name})",
        )

    def fullness_violations(self) -> List[Simplex]:
        """Simplices too large for the skeleton spanned by their vertices."""
        return [s for s in self.all_simplices() if len(s) - 1 > self.dim - sum(self.point_label(s))]

    def is_pure(self) -> bool:
        return all(len(f) - 1 == self.dim for f in self.facets)

    def __repr__(self):
        return f"FilteredComplex({self.name or '?'}, dim={self.dim}, f={self.f_vector()})"


class BifilteredComplex(FilteredComplex):
    """Filtered complex whose vertex labels are codimension pairs ``(k, l)``."""


EMPTY = FilteredComplex(-1, (), (), (), "empty")


# ---------------------------------------------------------------------------
# Diagnostics


@dataclass
class PseudomanifoldReport:
    pure: bool
    no_codim_one: bool
    full_skeleta: bool
    occupied_codims: List[int] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.pure and self.no_codim_one and self.full_skeleta


def validate_pseudomanifold(X: FilteredComplex) -> PseudomanifoldReport:
    """Non-fatal checks: purity, absence of a codimension-one stratum, full skeleta."""
    notes = []
    pure = X.is_pure()
    if not pure:
        bad = [f for f in X.facets if len(f) - 1 != X.dim]
        notes.append(f"{len(bad)} maximal simplices below dimension {X.dim}, e.g. {bad[0]}")
    codims = X.occupied_codims()
    no_c1 = 1 not in codims
    if not no_c1:
        notes.append("codimension-one stratum present")
    viol = X.fullness_violations()
    if viol:
        notes.append(f"{len(viol)} simplices violate skeleton fullness, e.g. {viol[0]}")
    return PseudomanifoldReport(pure, no_c1, not viol, codims, notes)


# ---------------------------------------------------------------------------
# Constructions


def _default_apex(L: FilteredComplex) -> Label:
    if L.apex_label is not None:
        return L.apex_label
    if L.width != 1:
        raise ValueError("cone on a bifiltered complex needs an explicit apex label")
    return (L.dim + 1,)


def cone(L: FilteredComplex, apex_label: Optional[Label] = None) -> FilteredComplex:
    """Closed cone with the apex appended as the last vertex.

    Skeleta satisfy ``(cL)^j = c(L^{j-1})``: labels of ``L`` are kept and the
    apex sits alone in the deepest stratum.  ``cone(EMPTY)`` is a point.
    """
    apex = apex_label or _default_apex(L)
    a = L.num_vertices
    facets = [f + (a,) for f in L.facets] or [(a,)]
    return FilteredComplex.from_facets(
        L.dim + 1,
        L.labels + (apex,),
        facets,
        L.names + ("apex",),
        name=f"cone({L.name})",
    )


def suspension(L: FilteredComplex) -> FilteredComplex:
    apex = _default_apex(L)
    a, b = L.num_vertices, L.num_vertices + 1
    facets = [f + (a,) for f in L.facets] + [f + (b,) for f in L.facets]
    if not facets:
        facets = [(a,), (b,)]
    return FilteredComplex.from_facets(
        L.dim + 1,
        L.labels + (apex, apex),
        facets,
        L.names + ("north", "south"),
        name=f"susp({L.name})",
    )


def disjoint_union(X: FilteredComplex, Y: FilteredComplex) -> FilteredComplex:
    if X.dim != Y.dim or X.width != Y.width:
        raise ValueError("disjoint union needs equal dimensions and label widths")
    off = X.num_vertices
    facets = list(X.facets) + [tuple(v + off for v in f) for f in Y.facets]
    return FilteredComplex.from_facets(
        X.dim, X.labels + Y.labels, facets, X.names + Y.names, name=f"{X.name}+{Y.name}"
    )


def _staircases(a: int, b: int):
    """Monotone lattice paths from (0, 0) to (a, b), as vertex-index pairs."""
    for xs in itertools.combinations(range(a + b), a):
        i = j = 0
        path = [(0, 0)]
        xs = set(xs)
        for step in range(a + b):
            if step in xs:
                i += 1
            else:
                j += 1
            path.append((i, j))
        yield path


def product(X: FilteredComplex, Y: FilteredComplex) -> BifilteredComplex:
    """Staircase triangulation of ``|X| x |Y|`` with concatenated labels.

    Vertex ``(v, w)`` gets index ``v * |Y| + w``, which is compatible with the
    product order, so every staircase is an ascending tuple.
    """
    ny = Y.num_vertices
    facets = []
    cache: Dict[Tuple[int, int], list] = {}
    for s in X.facets:
        for t in Y.facets:
            key = (len(s) - 1, len(t) - 1)
            if key not in cache:
                cache[key] = list(_staircases(*key))
            for path in cache[key]:
                facets.append(tuple(s[i] * ny + t[j] for i, j in path))
    labels = [lx + ly for lx in X.labels for ly in Y.labels]
    names = [f"{nx}.{nw}" for nx in X.names for nw in Y.names]
    out = FilteredComplex.from_facets(
        X.dim + Y.dim, labels, facets, names, name=f"product({X.name},{Y.name})"
    )
    viol = out.fullness_violations()
    if viol:
        raise AssertionError(f"product lost skeleton fullness at {viol[0]}")
    return out


def join(L1: FilteredComplex, L2: FilteredComplex) -> BifilteredComplex:
    """Join triangulated as the link of the apex pair in ``cL1 x cL2``.

    With ``k = dim L1 + 1`` and ``l = dim L2 + 1`` the vertices are the pairs
    ``(v, w)`` (label ``(codim v, codim w)``), ``(v, apex)`` (label
    ``(codim v, l)``) and ``(apex, w)`` (label ``(k, codim w)``); the cone on
    the join has apex label ``(k, l)``.  The naive join, with no vertex in
    the regular stratum, is too coarse for simplicial allowability.
    """
    if L1.num_vertices == 0 and L2.num_vertices == 0:
        raise ValueError("join of two empty complexes")
    if L1.width != 1 or L2.width != 1:
        raise ValueError("join expects singly filtered factors")
    k, l = L1.dim + 1, L2.dim + 1
    Z = product(cone(L1), cone(L2))
    J = vertex_link(Z, Z.num_vertices - 1)
    return FilteredComplex.from_facets(
        k + l - 1, J.labels, J.facets, J.names, name=f"join({L1.name},{L2.name})", apex_label=(k, l)
    )


def vertex_link(X: FilteredComplex, v: int) -> FilteredComplex:
    """Simplicial link of ``v``; link vertices keep their codimension labels.

    The formal dimension drops by one, so a link vertex in ``X^j`` lands in
    skeleton ``j - 1`` of the link; the cone on the link has apex label equal
    to the label of ``v``.
    """
    if not 0 <= v < X.num_vertices:
        raise ValueError(f"{v} is not a vertex")
    star = [s for s in X.facets if v in s]
    keep = sorted({w for s in star for w in s if w != v})
    new = {w: i for i, w in enumerate(keep)}
    facets = [tuple(new[w] for w in s if w != v) for s in star]
    return FilteredComplex.from_facets(
        X.dim - 1,
        [X.labels[w] for w in keep],
        [f for f in facets if f],
        [X.names[w] for w in keep],
        name=f"lk({X.name},{X.names[v]})",
        apex_label=X.labels[v],
    )


def normal_link(X: FilteredComplex, v: int) -> FilteredComplex:
    """Link of the stratum through ``v``.

    The simplicial link of ``v`` is a join of a sphere inside v's stratum with
    the normal link; linking again at a vertex of that sphere peels one
    sphere dimension off, until no vertex of v's stratum remains.
    """
    lab = X.labels[v]
    L = vertex_link(X, v)
    while True:
        same = [w for w in range(L.num_vertices) if L.labels[w] == lab]
        if not same:
            break
        L = vertex_link(L, same[0])
    return FilteredComplex.from_facets(
        L.dim, L.labels, L.facets, L.names, name=f"link({X.name},{X.names[v]})", apex_label=lab
    )


def barycentric_subdivision(X: FilteredComplex, repair: bool = False) -> FilteredComplex:
    """First barycentric subdivision; the barycenter of ``s`` gets the label of s's interior.

    With ``repair=True`` a simplex too large for the skeleton its vertices
    span is treated as lying in the regular stratum, which is what makes the
    subdivided skeleta full again.
    """
    order = sorted(X.all_simplices(), key=lambda s: (len(s), s))
    idx = {s: i for i, s in enumerate(order)}
    zero = (0,) * X.width
    labels = []
    for s in order:
        lab = X.point_label(s)
        if repair and len(s) - 1 > X.dim - sum(lab):
            lab = zero
        labels.append(lab)
    facets = []
    for f in X.facets:
        for perm in itertools.permutations(f):
            chain = [idx[tuple(sorted(perm[: r + 1]))] for r in range(len(perm))]
            facets.append(tuple(chain))
    names = ["b(" + ",".join(X.names[v] for v in s) + ")" for s in order]
    return FilteredComplex.from_facets(
        X.dim, labels, facets, names, name=f"sd({X.name})", apex_label=X.apex_label
    )


def ensure_full(X: FilteredComplex) -> Tuple[FilteredComplex, bool]:
    """Subdivide once (with repair) when some skeleton is not full."""
    if not X.fullness_violations():
        return X, False
    log.warning("%s: skeleta not full, applying one barycentric subdivision", X.name or "space")
    return barycentric_subdivision(X, repair=True), True


def face_signs(s: Simplex):
    """``(face, sign)`` pairs of the simplicial boundary of ``s``."""
    if len(s) == 1:
        return []
    return [(s[:j] + s[j + 1 :], -1 if j % 2 else 1) for j in range(len(s))]


def boundary_matrices(X: FilteredComplex, ring: Ring = ZZ) -> BoundedChainComplex:
    sizes = X.f_vector()
    bounds = [SparseMatrix(0, sizes[0] if sizes else 0)]
    for d in range(1, len(sizes)):
        idx = X.index[d - 1]
        cols = []
        for s in X.simplices[d]:
            cols.append({idx[f]: sgn for f, sgn in face_signs(s)})
        bounds.append(SparseMatrix(sizes[d - 1], sizes[d], cols))
    return BoundedChainComplex(ring, sizes, bounds)


def ordinary_homology(X: FilteredComplex, ring: Ring = ZZ):
    from .exactalg import homology_of_complex

    return homology_of_complex(boundary_matrices(X, ring))


def is_isomorphic(X: FilteredComplex, Y: FilteredComplex, respect_labels: bool = True) -> bool:
    """Brute-force simplicial isomorphism test (small complexes only)."""
    if X.f_vector() != Y.f_vector() or X.num_vertices != Y.num_vertices:
        return False
    if respect_labels and sorted(X.labels) != sorted(Y.labels):
        return False
    ysets = {frozenset(s) for s in Y.facets}
    xdeg = [sum(1 for f in X.facets if v in f) for v in range(X.num_vertices)]
    ydeg = [sum(1 for f in Y.facets if v in f) for v in range(Y.num_vertices)]
    n = X.num_vertices
    image = [None] * n
    used = [False] * n

    def compatible(v, w):
        if xdeg[v] != ydeg[w]:
            return False
        return not respect_labels or X.labels[v] == Y.labels[w]

    def extend(v):
        if v == n:
            return {frozenset(image[u] for u in f) for f in X.facets} == ysets
        for w in range(n):
            if not used[w] and compatible(v, w):
                image[v] = w
                used[w] = True
                if extend(v + 1):
                    return True
                used[w] = False
        return False

    return extend(0)
