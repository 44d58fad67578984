"""Small, deliberately naive reference implementations used only by the tests.

Nothing here imports the package's algebra: groups are lists of cyclic
orders (0 for a free summand), linear algebra is dense over Fractions, and
allowability is decided from the definition by enumerating faces.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd
from typing import Dict, List, Sequence, Tuple

# -- groups as sorted lists of cyclic orders ------------------------------


def group(free: int = 0, *orders: int) -> List[int]:
    """Canonical form: primary decomposition of torsion, free part as zeros."""
    out = [0] * free
    for n in orders:
        d = 2
        while n > 1:
            if n % d == 0:
                q = 1
                while n % d == 0:
                    n //= d
                    q *= d
                out.append(q)
            d += 1
    return sorted(out)


def canon(orders: Sequence[int]) -> List[int]:
    free = sum(1 for o in orders if o == 0)
    return group(free, *[o for o in orders if o > 1])


def g_tensor(a, b):
    out = []
    for x in a:
        for y in b:
            out.append(y if x == 0 else x if y == 0 else gcd(x, y))
    return canon(out)


def g_tor(a, b):
    return canon([gcd(x, y) for x in a for y in b if x and y])


def g_kunneth(A: List[List[int]], B: List[List[int]]) -> List[List[int]]:
    top = len(A) + len(B)
    out = []
    for i in range(top):
        terms = []
        for a in range(len(A)):
            b = i - a
            if 0 <= b < len(B):
                terms += g_tensor(A[a], B[b])
            b = i - 1 - a
            if 0 <= b < len(B):
                terms += g_tor(A[a], B[b])
        out.append(canon(terms))
    return trim(out)


def trim(H):
    H = [list(h) for h in H]
    while H and not H[-1]:
        H.pop()
    return H


def from_module(G) -> List[List[int]]:
    """Package GradedModule -> list of order lists (only the public string form is read)."""
    out = []
    for i in range(len(G)):
        M = G[i]
        out.append(canon([0] * M.rank + list(M.torsion)))
    return trim(out)


# -- dense rational rank --------------------------------------------------


def rank_q(rows: List[List[int]]) -> int:
    M = [[Fraction(x) for x in r] for r in rows if any(r)]
    rank = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(len(M)):
            if r != rank and M[r][c] != 0:
                f = M[r][c] / M[rank][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank


def nullspace_q(cols: List[Dict[int, int]], nrows_keys: List[int]) -> List[List[Fraction]]:
    """Basis of {x : sum x_j cols[j] = 0} over Q."""
    n = len(cols)
    if not nrows_keys:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    A = [[Fraction(cols[j].get(r, 0)) for j in range(n)] for r in nrows_keys]
    pivots = []
    row = 0
    for c in range(n):
        piv = next((r for r in range(row, len(A)) if A[r][c] != 0), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = 1 / A[row][c]
        A[row] = [x * inv for x in A[row]]
        for r in range(len(A)):
            if r != row and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[row])]
        pivots.append(c)
        row += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -A[r][fc]
        basis.append(v)
    return basis


# -- brute-force simplicial intersection homology over Q ------------------


def faces(s):
    for r in range(1, len(s) + 1):
        yield from itertools.combinations(s, r)


def interior_label(labels, t):
    return tuple(min(labels[v][c] for v in t) for c in range(len(labels[t[0]])))


def allowable(labels, value, s, bump=0) -> bool:
    """From the definition: the preimage of a stratum is the union of open faces with that label."""
    i = len(s) - 1
    dims: Dict[tuple, int] = {}
    for t in faces(s):
        lam = interior_label(labels, t)
        dims[lam] = max(dims.get(lam, -1), len(t) - 1)
    return all(d <= i - sum(lam) + value(lam) + bump for lam, d in dims.items())


def all_simplices(facets):
    out = set()
    for f in facets:
        out.update(faces(tuple(sorted(f))))
    by_dim: Dict[int, List[tuple]] = {}
    for s in out:
        by_dim.setdefault(len(s) - 1, []).append(s)
    return [sorted(by_dim[d]) for d in range(max(by_dim) + 1)]


def boundary(s):
    return [(s[:j] + s[j + 1:], (-1) ** j) for j in range(len(s))] if len(s) > 1 else []


def ih_betti(labels, facets, value, live=None) -> List[int]:
    """Rational intersection Betti numbers by dense linear algebra.

    ``value(label)`` is the perversity value; ``live(simplex)`` (optional)
    marks the simplices that survive in the quotient by the singular set.
    """
    layers = all_simplices(facets)
    live = live or (lambda s: True)
    gens = []  # per degree: list of vectors (dicts over simplices)
    for d, layer in enumerate(layers):
        ok = [s for s in layer if live(s) and allowable(labels, value, s)]
        bad_rows = set()
        cols = []
        for s in ok:
            col = {}
            for f, sg in boundary(s):
                if live(f) and not allowable(labels, value, f):
                    col[f] = col.get(f, 0) + sg
                    bad_rows.add(f)
            cols.append(col)
        ns = nullspace_q(cols, sorted(bad_rows))
        gens.append([{ok[j]: c for j, c in enumerate(v) if c} for v in ns])
    # ranks of boundary maps restricted to the intersection chains
    ranks = [0]
    for d in range(1, len(layers)):
        rows = []
        index = {s: i for i, s in enumerate(layers[d - 1])}
        for v in gens[d]:
            vec = [Fraction(0)] * len(layers[d - 1])
            for s, c in v.items():
                for f, sg in boundary(s):
                    if live(f):
                        vec[index[f]] += sg * c
            rows.append(vec)
        ranks.append(rank_q(rows) if rows else 0)
    ranks.append(0)
    betti = [len(gens[d]) - ranks[d] - ranks[d + 1] for d in range(len(layers))]
    while betti and betti[-1] == 0:
        betti.pop()
    return betti


def betti_of(G) -> List[int]:
    out = [G[i].rank for i in range(len(G))]
    while out and out[-1] == 0:
        out.pop()
    return out


# -- closed-form references ------------------------------------------------


def cone_truncation(H_L, n, pn, constant=True):
    if constant and pn > n - 2:
        return [[0]]
    return trim(H_L[: max(0, n - 1 - pn)])


def relative_cone(H_L, n, pn, constant=True):
    H = [list(h) for h in H_L]
    if constant and pn > n - 2 and H and 0 in H[0]:
        H[0] = list(H[0])
        H[0].remove(0)
    out = [[] for _ in range(len(H) + 1)]
    for i in range(max(1, n - pn), len(H) + 1):
        out[i] = H[i - 1]
    return trim(out)


# -- known homology of the library links and closed-form join ---------------

KNOWN = {
    "pt": [[0]],
    "s0": [[0, 0]],
    "s1": [[0], [0]],
    "2s1": [[0, 0], [0, 0]],
    "s2": [[0], [], [0]],
    "t2": [[0], [0, 0], [0]],
    "rp2": [[0], [2]],
}


def field_ranks(H, char: int) -> List[int]:
    """Betti numbers over Q (char 0) or Z/p by the universal coefficient theorem."""
    def hits(group):
        return sum(1 for o in group if o and char and o % char == 0)

    out = []
    for i in range(len(H) + 1):
        cur = H[i] if i < len(H) else []
        prev = H[i - 1] if 0 < i <= len(H) else []
        out.append(sum(1 for o in cur if o == 0) + hits(cur) + hits(prev))
    while out and out[-1] == 0:
        out.pop()
    return out


def g_join(H1, H2, k, l, pk, ql):
    """Block form of the join formula with cut-offs alpha = k-1-p(k), beta = l-1-q(l)."""
    alpha, beta = k - 1 - pk, l - 1 - ql
    out = [[] for _ in range(len(H1) + len(H2) + 2)]
    for a, A in enumerate(H1):
        for b, B in enumerate(H2):
            if a < alpha and b < beta:
                out[a + b] += g_tensor(A, B)
                out[a + b + 1] += g_tor(A, B)
            elif a >= alpha and b >= beta:
                out[a + b + 1] += g_tensor(A, B)
                out[a + b + 2] += g_tor(A, B)
    return trim([canon(g) for g in out])
