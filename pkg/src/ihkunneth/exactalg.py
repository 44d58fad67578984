"""Exact linear algebra over Z, Q and Z/p, and finitely generated modules.

Matrices come in two flavours.  Dense matrices are plain lists of rows and
are used by :func:`smith_normal_form`, which also returns the transformation
matrices.  Chain complexes store their boundary maps as :class:`SparseMatrix`
(a list of columns, each a ``{row: value}`` dict); homology only needs ranks
and invariant factors, which are extracted by sparse unit-pivot elimination
followed by a dense Smith reduction of whatever is left over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

SparseVector = Dict[int, int]


# ---------------------------------------------------------------------------
# Rings


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: the integers, the rationals or a prime field."""

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Zp"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Zp":
            if self.p is None or not _is_prime(self.p):
                raise ValueError(f"Zp needs a prime modulus, got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"ring {self.kind} takes no modulus")

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def modulus(self) -> Optional[int]:
        return self.p

    @classmethod
    def parse(cls, text: str) -> "Ring":
        text = text.strip()
        if text in ("Z", "ZZ"):
            return ZZ
        if text in ("Q", "QQ"):
            return QQ
        for prefix in ("Zp:", "Z/", "GF"):
            if text.startswith(prefix):
                return cls("Zp", int(text[len(prefix):]))
        raise ValueError(f"cannot parse ring {text!r} (use Z, Q or Zp:<p>)")

    def __str__(self):
        return f"Z/{self.p}" if self.kind == "Zp" else self.kind


ZZ = Ring("Z")
QQ = Ring("Q")


def GF(p: int) -> Ring:
    return Ring("Zp", p)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) >= 0`` and ``a*x + b*y = g``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# Finitely generated modules


def _prime_power_split(n: int) -> List[Tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 1
            while n % d == 0:
                n //= d
                e *= d
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, n))
    return out


def invariant_factors(orders: Iterable[int]) -> Tuple[int, ...]:
    """Turn cyclic orders of arbitrary sign into a divisibility chain of factors >= 2.

    Zero orders are not allowed here (they are free summands).
    """
    by_prime: Dict[int, List[int]] = {}
    for d in orders:
        d = abs(d)
        if d == 0:
            raise ValueError("free summand passed as a torsion order")
        for prime, power in _prime_power_split(d):
            by_prime.setdefault(prime, []).append(power)
    if not by_prime:
        return ()
    for powers in by_prime.values():
        powers.sort(reverse=True)
    length = max(len(v) for v in by_prime.values())
    factors = []
    for i in range(length):
        f = 1
        for powers in by_prime.values():
            if i < len(powers):
                f *= powers[i]
        factors.append(f)
    return tuple(sorted(factors))


@dataclass(frozen=True)
class FgModule:
    """A finitely generated module ``R^rank + R/d_1 + ... + R/d_t`` with ``d_1 | d_2 | ...``."""

    ring: Ring
    rank: int = 0
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative rank")
        if self.ring.is_field and self.torsion:
            raise ValueError(f"torsion over the field {self.ring}")
        t = self.torsion
        if any(d < 2 for d in t) or any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"torsion {t} is not an invariant-factor chain")

    @classmethod
    def build(cls, ring: Ring, rank: int = 0, orders: Iterable[int] = ()) -> "FgModule":
        """Normalising constructor: ``orders`` may be any cyclic orders; units are dropped."""
        orders = [abs(d) for d in orders]
        rank += sum(1 for d in orders if d == 0)
        nonzero = [d for d in orders if d not in (0, 1)]
        if ring.is_field:
            return cls(ring, rank, ())
        return cls(ring, rank, invariant_factors(nonzero))

    @classmethod
    def zero(cls, ring: Ring) -> "FgModule":
        return cls(ring)

    @property
    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def __add__(self, other: "FgModule") -> "FgModule":
        _same_ring(self.ring, other.ring)
        return FgModule.build(self.ring, self.rank + other.rank, self.torsion + other.torsion)

    def __str__(self):
        if self.is_zero:
            return "0"
        base = str(self.ring)
        parts = []
        if self.rank == 1:
            parts.append(base)
        elif self.rank > 1:
            parts.append(f"{base}^{self.rank}")
        for d in self.torsion:
            parts.append(f"Z/{d}")
        return " + ".join(parts)


def parse_module(text: str, ring: Ring = None) -> FgModule:
    """Parse ``"0"``, ``"Z"``, ``"Z^2 + Z/2"`` and the like."""
    ring = ring or ZZ
    text = text.strip()
    if text in ("0", ""):
        return FgModule(ring)
    rank = 0
    orders = []
    for part in text.replace("⊕", "+").split("+"):
        part = part.strip()
        if part.startswith("Z/"):
            orders.append(int(part[2:]))
            continue
        base, _, exp = part.partition("^")
        if base.strip() not in ("Z", "Q", str(ring)):
            raise ValueError(f"cannot parse module summand {part!r}")
        rank += int(exp) if exp else 1
    return FgModule.build(ring, rank, orders)


def _same_ring(a: Ring, b: Ring):
    if a != b:
        raise ValueError(f"ring mismatch: {a} vs {b}")


@dataclass(frozen=True)
class GradedModule:
    """Finitely supported sequence of modules indexed by degree 0, 1, 2, ...

    Trailing zero modules are trimmed, so equality is abstract isomorphism
    degree by degree.
    """

    ring: Ring
    groups: Tuple[FgModule, ...] = ()

    def __post_init__(self):
        groups = tuple(self.groups)
        for g in groups:
            _same_ring(self.ring, g.ring)
        while groups and groups[-1].is_zero:
            groups = groups[:-1]
        object.__setattr__(self, "groups", groups)

    @classmethod
    def from_dict(cls, ring: Ring, by_degree: Dict[int, FgModule]) -> "GradedModule":
        if not by_degree:
            return cls(ring)
        if min(by_degree) < 0:
            raise ValueError("negative degree")
        top = max(by_degree)
        return cls(ring, tuple(by_degree.get(i, FgModule(ring)) for i in range(top + 1)))

    @classmethod
    def parse(cls, text: str, ring: Ring = None) -> "GradedModule":
        """``"(Z, Z/2, 0)"`` -> graded module; entries separated by commas."""
        ring = ring or ZZ
        text = text.strip().strip("()")
        if not text:
            return cls(ring)
        return cls(ring, tuple(parse_module(t, ring) for t in text.split(",")))

    def __getitem__(self, degree: int) -> FgModule:
        if 0 <= degree < len(self.groups):
            return self.groups[degree]
        return FgModule(self.ring)

    def __len__(self):
        return len(self.groups)

    @property
    def top_degree(self) -> int:
        return len(self.groups) - 1

    @property
    def is_zero(self) -> bool:
        return not self.groups

    def ranks(self) -> List[int]:
        return [g.rank for g in self.groups]

    def __str__(self):
        if not self.groups:
            return "(0)"
        return "(" + ", ".join(str(g) for g in self.groups) + ")"


def tensor(a: FgModule, b: FgModule) -> FgModule:
    _same_ring(a.ring, b.ring)
    orders = [d for d in b.torsion for _ in range(a.rank)]
    orders += [d for d in a.torsion for _ in range(b.rank)]
    orders += [math.gcd(d, e) for d in a.torsion for e in b.torsion]
    return FgModule.build(a.ring, a.rank * b.rank, orders)


def torsion_product(a: FgModule, b: FgModule) -> FgModule:
    """Tor_1 over the ring; zero over a field or when either side is free."""
    _same_ring(a.ring, b.ring)
    if a.ring.is_field:
        return FgModule(a.ring)
    return FgModule.build(a.ring, 0, [math.gcd(d, e) for d in a.torsion for e in b.torsion])


def direct_sum(modules: Iterable[FgModule], ring: Ring) -> FgModule:
    total = FgModule(ring)
    for m in modules:
        total = total + m
    return total


def kunneth_rhs(a: GradedModule, b: GradedModule) -> GradedModule:
    """Homology of the tensor product of two complexes with the given homology."""
    _same_ring(a.ring, b.ring)
    ring = a.ring
    out: Dict[int, FgModule] = {}
    for j, aj in enumerate(a.groups):
        for k, bk in enumerate(b.groups):
            out[j + k] = out.get(j + k, FgModule(ring)) + tensor(aj, bk)
            out[j + k + 1] = out.get(j + k + 1, FgModule(ring)) + torsion_product(aj, bk)
    return GradedModule.from_dict(ring, out)


def reduce_degree_zero(a: GradedModule) -> GradedModule:
    """Reduced homology: drop one free summand in degree 0."""
    h0 = a[0]
    if h0.rank == 0:
        raise ValueError("degree-0 group has no free summand to remove")
    groups = list(a.groups)
    groups[0] = FgModule(a.ring, h0.rank - 1, h0.torsion)
    return GradedModule(a.ring, tuple(groups))


def shift(a: GradedModule, by: int) -> GradedModule:
    """Re-index so that degree ``i`` of the result is degree ``i - by`` of ``a``."""
    return GradedModule.from_dict(
        a.ring, {i + by: g for i, g in enumerate(a.groups) if i + by >= 0 and not g.is_zero}
    )


# ---------------------------------------------------------------------------
# Dense Smith normal form


def _ring_elems(M: Sequence[Sequence], ring: Ring) -> List[list]:
    if ring.kind == "Z":
        return [[int(x) for x in row] for row in M]
    if ring.kind == "Q":
        return [[Fraction(x) for x in row] for row in M]
    p = ring.p
    return [[int(x) % p for x in row] for row in M]


def identity(n: int, ring: Ring = ZZ) -> List[list]:
    one = Fraction(1) if ring.kind == "Q" else 1
    zero = Fraction(0) if ring.kind == "Q" else 0
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence], ring: Ring = ZZ) -> List[list]:
    n = len(A)
    m = len(B[0]) if B else 0
    inner = len(B)
    out = [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(m)] for i in range(n)]
    if ring.kind == "Zp":
        out = [[x % ring.p for x in row] for row in out]
    return out


def determinant(M: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return det


def smith_normal_form(M: Sequence[Sequence], ring: Ring = ZZ):
    """Return ``(U, D, V)`` with ``U @ M @ V == D``.

    ``U`` and ``V`` are invertible over ``ring`` and ``D`` is diagonal with
    ``d_1 | d_2 | ...`` (non-negative over Z, 1s over a field).  The pivot is
    always the remaining entry of least absolute value, ties broken by the
    lowest ``(row, col)``, so the output is deterministic.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    D = _ring_elems(M, ring)
    U = identity(rows, ring)
    V = identity(cols, ring)
    p = ring.p

    def norm(x):
        return abs(x)

    def row_op(target, src, f):
        # row_target -= f * row_src, on D and U
        for mat in (D, U):
            r_t, r_s = mat[target], mat[src]
            for j in range(len(r_t)):
                r_t[j] -= f * r_s[j]
                if p:
                    r_t[j] %= p

    def col_op(target, src, f):
        # col_target -= f * col_src, on D and V
        for mat in (D, V):
            for row in mat:
                row[target] -= f * row[src]
                if p:
                    row[target] %= p

    def swap_rows(a, b):
        if a != b:
            D[a], D[b] = D[b], D[a]
            U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        if a != b:
            for mat in (D, V):
                for row in mat:
                    row[a], row[b] = row[b], row[a]

    def divide(x, y):
        if ring.kind == "Z":
            return x // y
        if ring.kind == "Q":
            return x / y
        return x * pow(y, -1, p) % p

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if D[i][j] != 0 and (best is None or norm(D[i][j]) < best[0]):
                    best = (norm(D[i][j]), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            a = D[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if D[i][t] != 0:
                    row_op(i, t, divide(D[i][t], a))
                    if D[i][t] != 0:
                        dirty = True
            for j in range(t + 1, cols):
                if D[t][j] != 0:
                    col_op(j, t, divide(D[t][j], a))
                    if D[t][j] != 0:
                        dirty = True
            if dirty:
                # a smaller remainder appeared in row/column t: re-pivot on it
                best = None
                for i in range(t, rows):
                    if D[i][t] != 0 and (best is None or norm(D[i][t]) < best[0]):
                        best = (norm(D[i][t]), i, t)
                for j in range(t, cols):
                    if D[t][j] != 0 and (best is None or norm(D[t][j]) < best[0]):
                        best = (norm(D[t][j]), t, j)
                _, i, j = best
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            if ring.kind == "Z":
                bad = next(
                    (i for i in range(t + 1, rows) for j in range(t + 1, cols) if D[i][j] % a),
                    None,
                )
                if bad is not None:
                    # fold the offending row into row t and keep reducing
                    row_op(t, bad, -1)
                    continue
            break
        if ring.kind == "Z":
            if D[t][t] < 0:
                for mat in (D, U):
                    mat[t] = [-x for x in mat[t]]
        else:
            inv = divide(1, D[t][t]) if ring.kind == "Zp" else 1 / D[t][t]
            for mat in (D, U):
                mat[t] = [(x * inv) % p if p else x * inv for x in mat[t]]
        t += 1
    return U, D, V


def diagonal_of(D: Sequence[Sequence]) -> List:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


# ---------------------------------------------------------------------------
# Sparse matrices and bounded chain complexes


@dataclass
class SparseMatrix:
    """Column-major sparse matrix: ``cols[j]`` maps row index to a nonzero entry."""

    nrows: int
    ncols: int
    cols: List[SparseVector] = field(default_factory=list)

    def __post_init__(self):
        if not self.cols:
            self.cols = [{} for _ in range(self.ncols)]
        if len(self.cols) != self.ncols:
            raise ValueError("column count mismatch")

    @classmethod
    def from_dense(cls, M: Sequence[Sequence[int]]) -> "SparseMatrix":
        nrows = len(M)
        ncols = len(M[0]) if nrows else 0
        cols = [{i: M[i][j] for i in range(nrows) if M[i][j]} for j in range(ncols)]
        return cls(nrows, ncols, cols)

    def to_dense(self) -> List[List[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = []
        for col in other.cols:
            acc: SparseVector = {}
            for k, v in col.items():
                for i, w in self.cols[k].items():
                    acc[i] = acc.get(i, 0) + w * v
            out.append({i: x for i, x in acc.items() if x})
        return SparseMatrix(self.nrows, other.ncols, out)


def _reduce_vec(vec: SparseVector, p: Optional[int]) -> SparseVector:
    if p is None:
        return {i: v for i, v in vec.items() if v}
    return {i: v % p for i, v in vec.items() if v % p}


@dataclass
class BoundedChainComplex:
    """Free chain complex ``C_0 <- C_1 <- ...``; ``boundaries[i]`` maps degree i to i-1.

    ``boundaries[0]`` is the zero map out of degree 0 (its row count is 0).
    """

    ring: Ring
    sizes: List[int]
    boundaries: List[SparseMatrix]

    def __post_init__(self):
        if len(self.boundaries) != len(self.sizes):
            raise ValueError("one boundary matrix per degree expected")
        for i, d in enumerate(self.boundaries):
            expect_rows = self.sizes[i - 1] if i > 0 else 0
            if d.ncols != self.sizes[i] or d.nrows != expect_rows:
                raise ValueError(f"boundary {i} has shape {d.nrows}x{d.ncols}")

    @classmethod
    def from_dense(cls, ring: Ring, sizes: Sequence[int], mats: Sequence) -> "BoundedChainComplex":
        """``mats[i-1]`` is the dense matrix of the boundary from degree i to i-1."""
        bounds = [SparseMatrix(0, sizes[0])] if sizes else []
        for i in range(1, len(sizes)):
            M = mats[i - 1]
            if not M or not M[0]:
                bounds.append(SparseMatrix(sizes[i - 1], sizes[i]))
            else:
                bounds.append(SparseMatrix.from_dense(M))
        return cls(ring, list(sizes), bounds)

    def check_dd_zero(self) -> bool:
        p = self.ring.p
        for i in range(2, len(self.sizes)):
            prod = self.boundaries[i - 1] @ self.boundaries[i]
            if any(_reduce_vec(c, p) for c in prod.cols):
                return False
        return True


def _integral_columns(mat: SparseMatrix, ring: Ring) -> List[SparseVector]:
    p = ring.p
    cols = []
    for col in mat.cols:
        if ring.kind == "Q" and any(isinstance(v, Fraction) and v.denominator != 1 for v in col.values()):
            scale = math.lcm(*(Fraction(v).denominator for v in col.values()))
            col = {i: int(Fraction(v) * scale) for i, v in col.items()}
        col = _reduce_vec(col, p)
        if col:
            cols.append(col)
    return cols


def rank_and_factors(mat: SparseMatrix, ring: Ring) -> Tuple[int, List[int]]:
    """Rank of ``mat`` and, over Z, its invariant factors larger than 1.

    Unit pivots are eliminated sparsely first (each removes one row, one
    column and an invariant factor 1); the remainder is finished densely.
    Over Q the integer matrix is used directly since only its rank matters.
    """
    p = ring.p
    cols = _integral_columns(mat, ring)
    rows: Dict[int, set] = {}
    for j, col in enumerate(cols):
        for i in col:
            rows.setdefault(i, set()).add(j)
    alive = set(range(len(cols)))
    rank = 0

    def is_unit(v):
        return True if p else v in (1, -1)

    progress = True
    while progress:
        progress = False
        for j in sorted(alive, key=lambda c: len(cols[c])):
            if j not in alive:
                continue
            col = cols[j]
            if not col:
                alive.discard(j)
                continue
            best = None
            for i, v in col.items():
                if is_unit(v):
                    cnt = len(rows[i])
                    if best is None or cnt < best[0]:
                        best = (cnt, i)
                        if cnt == 1:
                            break
            if best is None:
                continue
            i = best[1]
            pv = col[i]
            inv = pow(pv, -1, p) if p else pv  # pv is +-1 over Z
            for j2 in list(rows[i]):
                if j2 == j:
                    continue
                c2 = cols[j2]
                f = c2[i] * inv
                if p:
                    f %= p
                for r, v in col.items():
                    nv = c2.get(r, 0) - f * v
                    if p:
                        nv %= p
                    if nv:
                        if r not in c2:
                            rows[r].add(j2)
                        c2[r] = nv
                    elif r in c2:
                        del c2[r]
                        rows[r].discard(j2)
            for r in col:
                rows[r].discard(j)
            cols[j] = {}
            alive.discard(j)
            rank += 1
            progress = True
    rest = [cols[j] for j in sorted(alive) if cols[j]]
    if not rest:
        return rank, []
    if ring.kind == "Q":
        # rank only
        used = sorted({i for c in rest for i in c})
        idx = {r: k for k, r in enumerate(used)}
        dense = [[0] * len(rest) for _ in used]
        for j, c in enumerate(rest):
            for i, v in c.items():
                dense[idx[i]][j] = v
        return rank + _rank_fraction_free(dense), []
    used = sorted({i for c in rest for i in c})
    idx = {r: k for k, r in enumerate(used)}
    dense = [[0] * len(rest) for _ in used]
    for j, c in enumerate(rest):
        for i, v in c.items():
            dense[idx[i]][j] = v
    diag = _diagonal_invariants(dense, p)
    rank += len(diag)
    return rank, [d for d in diag if d != 1]


def _rank_fraction_free(M: List[List[int]]) -> int:
    A = [row[:] for row in M]
    n = len(A)
    m = len(A[0]) if n else 0
    r = 0
    prev = 1
    for c in range(m):
        piv = next((i for i in range(r, n) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, n):
            A[i] = [(A[r][c] * A[i][k] - A[i][c] * A[r][k]) // prev for k in range(m)]
        prev = A[r][c]
        r += 1
        if r == n:
            break
    return r


def _diagonal_invariants(M: List[List[int]], p: Optional[int]) -> List[int]:
    """Nonzero invariant factors of a dense matrix (no transforms kept)."""
    A = [row[:] for row in M]
    n = len(A)
    m = len(A[0]) if n else 0
    diag = []
    t = 0
    while t < min(n, m):
        best = None
        for i in range(t, n):
            row = A[i]
            for j in range(t, m):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        A[t], A[i] = A[i], A[t]
        if j != t:
            for row in A:
                row[t], row[j] = row[j], row[t]
        while True:
            a = A[t][t]
            dirty = False
            for i in range(t + 1, n):
                v = A[i][t]
                if v:
                    f = v * pow(a, -1, p) % p if p else v // a
                    ri, rt = A[i], A[t]
                    A[i] = [(x - f * y) % p if p else x - f * y for x, y in zip(ri, rt)]
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, m):
                v = A[t][j]
                if v:
                    f = v * pow(a, -1, p) % p if p else v // a
                    for row in A:
                        row[j] = (row[j] - f * row[t]) % p if p else row[j] - f * row[t]
                    if A[t][j]:
                        dirty = True
            if dirty:
                best = None
                for i in range(t, n):
                    if A[i][t] and (best is None or abs(A[i][t]) < best[0]):
                        best = (abs(A[i][t]), i, t)
                for j in range(t, m):
                    if A[t][j] and (best is None or abs(A[t][j]) < best[0]):
                        best = (abs(A[t][j]), t, j)
                _, i, j = best
                A[t], A[i] = A[i], A[t]
                if j != t:
                    for row in A:
                        row[t], row[j] = row[j], row[t]
                continue
            if not p:
                bad = next((i for i in range(t + 1, n) if any(x % a for x in A[i][t + 1:])), None)
                if bad is not None:
                    A[t] = [x + y for x, y in zip(A[t], A[bad])]
                    continue
            break
        diag.append(1 if p else abs(A[t][t]))
        t += 1
    return diag


def homology_of_complex(C: BoundedChainComplex, check: bool = True) -> GradedModule:
    """``H_i = ker d_i / im d_{i+1}`` in invariant-factor form."""
    if check and not C.check_dd_zero():
        raise ValueError("boundary maps do not square to zero")
    ring = C.ring
    n = len(C.sizes)
    info = [rank_and_factors(C.boundaries[i], ring) if i > 0 else (0, []) for i in range(n)]
    groups = []
    for i in range(n):
        rank_out = info[i][0]
        rank_in, factors_in = info[i + 1] if i + 1 < n else (0, [])
        free = C.sizes[i] - rank_out - rank_in
        groups.append(FgModule.build(ring, free, factors_in if not ring.is_field else ()))
    return GradedModule(ring, tuple(groups))


# ---------------------------------------------------------------------------
# Lattices of sparse vectors: kernels and echelon bases


def _axpy(y: SparseVector, a: int, x: SparseVector, p: Optional[int]) -> None:
    """In place ``y += a * x``."""
    for k, v in x.items():
        nv = y.get(k, 0) + a * v
        if p:
            nv %= p
        if nv:
            y[k] = nv
        elif k in y:
            del y[k]


def _combine(a: int, x: SparseVector, b: int, y: SparseVector, p: Optional[int]) -> SparseVector:
    out: SparseVector = {}
    if a:
        for k, v in x.items():
            out[k] = a * v
    if b:
        for k, v in y.items():
            out[k] = out.get(k, 0) + b * v
    return _reduce_vec(out, p)


def sparse_kernel(columns: Sequence[SparseVector], p: Optional[int] = None) -> List[SparseVector]:
    """Basis of ``{x : sum_j x_j columns[j] = 0}``; over Z it is saturated.

    Column operations are unimodular, so the combinations that reduce to zero
    extend to a basis of the whole coefficient lattice.
    """
    pivots: Dict[int, Tuple[SparseVector, SparseVector]] = {}
    kernel = []
    for j, col in enumerate(columns):
        v = _reduce_vec(col, p)
        t: SparseVector = {j: 1}
        while v:
            r = min(v)
            if r not in pivots:
                if p:
                    inv = pow(v[r], -1, p)
                    v = {k: x * inv % p for k, x in v.items()}
                    t = {k: x * inv % p for k, x in t.items()}
                pivots[r] = (v, t)
                break
            pv, pt = pivots[r]
            a, b = pv[r], v[r]
            if p:
                f = b  # pivots are normalised to 1
                _axpy(v, -f, pv, p)
                _axpy(t, -f, pt, p)
            elif b % a == 0:
                f = b // a
                _axpy(v, -f, pv, None)
                _axpy(t, -f, pt, None)
            else:
                g, x, y = xgcd(a, b)
                nv = _combine(x, pv, y, v, None)
                nt = _combine(x, pt, y, t, None)
                ov = _combine(b // g, pv, -(a // g), v, None)
                ot = _combine(b // g, pt, -(a // g), t, None)
                pivots[r] = (nv, nt)
                v, t = ov, ot
        else:
            kernel.append(t)
    return kernel


class EchelonBasis:
    """A lattice basis whose vectors have pairwise distinct leading (minimum) indices.

    ``add`` inserts generators (keeping the span), ``solve`` expresses a
    vector of the lattice in terms of the basis.
    """

    def __init__(self, p: Optional[int] = None):
        self.p = p
        self.vectors: List[SparseVector] = []
        self._lead: Dict[int, int] = {}

    @classmethod
    def of_units(cls, indices: Iterable[int], p: Optional[int] = None) -> "EchelonBasis":
        eb = cls(p)
        for i in indices:
            eb._lead[i] = len(eb.vectors)
            eb.vectors.append({i: 1})
        return eb

    def __len__(self):
        return len(self.vectors)

    def add(self, vec: SparseVector) -> None:
        p = self.p
        v = _reduce_vec(vec, p)
        while v:
            r = min(v)
            slot = self._lead.get(r)
            if slot is None:
                if p:
                    inv = pow(v[r], -1, p)
                    v = {k: x * inv % p for k, x in v.items()}
                elif v[r] < 0:
                    v = {k: -x for k, x in v.items()}
                self._lead[r] = len(self.vectors)
                self.vectors.append(v)
                return
            pv = self.vectors[slot]
            a, b = pv[r], v[r]
            if p:
                _axpy(v, -b * pow(a, -1, p), pv, p)
            elif b % a == 0:
                _axpy(v, -(b // a), pv, None)
            else:
                g, x, y = xgcd(a, b)
                self.vectors[slot] = _combine(x, pv, y, v, None)
                v = _combine(b // g, pv, -(a // g), v, None)

    def solve(self, vec: SparseVector) -> SparseVector:
        """Coordinates of ``vec`` in this basis; raises if it is not in the lattice."""
        p = self.p
        v = _reduce_vec(vec, p)
        out: SparseVector = {}
        while v:
            r = min(v)
            slot = self._lead.get(r)
            if slot is None:
                raise ValueError("vector is not in the span of the basis")
            pv = self.vectors[slot]
            a, b = pv[r], v[r]
            if p:
                f = b * pow(a, -1, p) % p
            else:
                if b % a:
                    raise ValueError("vector is in the rational span but not the lattice")
                f = b // a
            out[slot] = f
            if len(pv) == 1:
                del v[r]
            else:
                _axpy(v, -f, pv, p)
        return out
