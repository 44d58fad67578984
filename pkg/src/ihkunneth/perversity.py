"""Perversities, product perversities and the hypotheses of the Kunneth theorem."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .exactalg import ZZ, FgModule, GradedModule, Ring, torsion_product


class PerversityError(ValueError):
    pass


@dataclass(frozen=True)
class Perversity:
    """Values ``p(0), ..., p(n)``; ``p(0) = 0`` is enforced."""

    values: Tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise PerversityError("empty perversity")
        if vals[0] != 0:
            raise PerversityError(f"p(0) must be 0, got {vals[0]}")

    @property
    def max_codim(self) -> int:
        return len(self.values) - 1

    def __call__(self, k: int) -> int:
        if not 0 <= k < len(self.values):
            raise PerversityError(f"perversity {self} has no value at codimension {k}")
        return self.values[k]

    def value(self, label: Sequence[int]) -> int:
        """Value on a stratum label; a single perversity sees total codimension."""
        return self(sum(label))

    # -- flags ------------------------------------------------------------

    @property
    def gm_growth(self) -> bool:
        v = self.values
        return all(v[k] <= v[k + 1] <= v[k] + 1 for k in range(len(v) - 1))

    @property
    def traditional(self) -> bool:
        return self.gm_growth and all(self.values[k] == 0 for k in range(min(3, len(self.values))))

    @property
    def is_super(self) -> bool:
        # codimension one never occurs on a pseudomanifold, so k = 1 is ignored
        return any(self.values[k] > k - 2 for k in range(2, len(self.values)))

    @property
    def within_range(self) -> bool:
        return not self.is_super

    def super_at(self, k: int) -> bool:
        return k >= 1 and self(k) > k - 2

    def dual(self) -> "Perversity":
        return Perversity(tuple([0] + [k - 2 - self.values[k] for k in range(1, len(self.values))]))

    def extended(self, n: int, fill: Optional[Callable[[int], int]] = None) -> "Perversity":
        """Pad to codimension ``n``, continuing with ``fill`` or the last value."""
        vals = list(self.values)
        while len(vals) <= n:
            k = len(vals)
            vals.append(fill(k) if fill else vals[-1])
        return Perversity(tuple(vals[: max(n + 1, len(self.values))]))

    def __le__(self, other: "Perversity") -> bool:
        n = min(len(self.values), len(other.values))
        return all(self.values[k] <= other.values[k] for k in range(n))

    def __str__(self):
        return "(" + ",".join(map(str, self.values)) + ")"


def validate(raw: Sequence[int]) -> Perversity:
    return Perversity(tuple(raw))


def normalize_super(p: Perversity) -> Perversity:
    """``p(k) -> min(p(k), k - 1)``; homology is unchanged by this clamp."""
    return Perversity(tuple([0] + [min(p.values[k], k - 1) for k in range(1, len(p.values))]))


PRESETS: Dict[str, Callable[[int], int]] = {
    "zero": lambda k: 0,
    "lower-middle": lambda k: max(0, (k - 2) // 2),
    "upper-middle": lambda k: max(0, (k - 1) // 2),
    "top": lambda k: max(0, k - 2),
}


def preset(name: str, n: int) -> Perversity:
    try:
        f = PRESETS[name]
    except KeyError:
        raise PerversityError(f"unknown perversity preset {name!r}") from None
    return Perversity(tuple([0] + [f(k) for k in range(1, n + 1)]))


def parse_perversity(text: str, n: int) -> Perversity:
    """A preset name or comma separated values; short lists are padded with their last value."""
    text = text.strip()
    if text in PRESETS:
        return preset(text, n)
    try:
        vals = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise PerversityError(f"bad perversity {text!r}") from None
    p = Perversity(tuple(vals))
    return p.extended(n) if p.max_codim < n else p


# ---------------------------------------------------------------------------
# Product perversities


@dataclass(frozen=True)
class ProductPerversity:
    """Table ``Q(k, l)`` for ``0 <= k <= m`` and ``0 <= l <= n``."""

    table: Tuple[Tuple[int, ...], ...]
    mode: str = "table"

    def __post_init__(self):
        tab = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", tab)
        if not tab or not tab[0] or len({len(r) for r in tab}) != 1:
            raise PerversityError("product perversity table must be a nonempty rectangle")
        if tab[0][0] < 0:
            raise PerversityError("Q(0,0) must be nonnegative")

    @property
    def m(self) -> int:
        return len(self.table) - 1

    @property
    def n(self) -> int:
        return len(self.table[0]) - 1

    def __call__(self, k: int, l: int) -> int:
        if not (0 <= k <= self.m and 0 <= l <= self.n):
            raise PerversityError(f"Q has no value at ({k},{l})")
        return self.table[k][l]

    def value(self, label: Sequence[int]) -> int:
        if len(label) != 2:
            raise PerversityError("product perversity needs codimension pairs")
        return self(label[0], label[1])

    def shift(self, p: Perversity, q: Perversity, k: int, l: int) -> int:
        return self(k, l) - p(k) - q(l)

    def with_cell(self, k: int, l: int, value: int) -> "ProductPerversity":
        rows = [list(r) for r in self.table]
        rows[k][l] = value
        return ProductPerversity(tuple(map(tuple, rows)), self.mode)

    def __str__(self):
        return "\n".join(" ".join(f"{x:3d}" for x in row) for row in self.table)


ShiftSpec = Union[int, Mapping[Tuple[int, int], int], Callable[[int, int], int], None]


def _shift_at(shifts: ShiftSpec, k: int, l: int) -> int:
    if shifts is None:
        return 0
    if isinstance(shifts, int):
        return shifts
    if callable(shifts):
        return shifts(k, l)
    return shifts.get((k, l), 0)


def make_product_perversity(
    mode: str,
    p: Perversity,
    q: Optional[Perversity] = None,
    shifts: ShiftSpec = None,
    m: Optional[int] = None,
    n: Optional[int] = None,
    table: Optional[Sequence[Sequence[int]]] = None,
) -> ProductPerversity:
    """Build ``Q`` in one of the modes ``sum``, ``cgj``, ``king``, ``shift`` or ``table``.

    ``cgj`` reads ``Q(k, l) = p(k + l)`` so ``p`` must reach codimension
    ``m + n``; ``king`` is ``Q(k, l) = p(k)`` and is meant for ``q = 0``.
    """
    q = q if q is not None else p
    m = p.max_codim if m is None else m
    n = q.max_codim if n is None else n
    if mode == "table":
        if table is None:
            raise PerversityError("table mode needs a table")
        return ProductPerversity(tuple(map(tuple, table)), "table")
    if mode == "sum":
        f = lambda k, l: p(k) + q(l)
    elif mode == "cgj":
        if p.max_codim < m + n:
            raise PerversityError(f"cgj mode needs p up to codimension {m + n}")
        f = lambda k, l: p(k + l)
    elif mode == "king":
        f = lambda k, l: p(k)
    elif mode == "shift":

        def f(k, l):
            if k == 0 or l == 0:
                return p(k) + q(l)
            s = _shift_at(shifts, k, l)
            if s not in (0, 1, 2):
                raise PerversityError(f"shift at ({k},{l}) must be 0, 1 or 2, got {s}")
            return p(k) + q(l) + s

    else:
        raise PerversityError(f"unknown product perversity mode {mode!r}")
    return ProductPerversity(tuple(tuple(f(k, l) for l in range(n + 1)) for k in range(m + 1)), mode)


# ---------------------------------------------------------------------------
# Theorem hypotheses


@dataclass
class CellVerdict:
    k: int
    l: int
    tag: str  # "0", "1", "2a", "2b", "2c", "vacant", "violation"
    ok: bool
    shift: Optional[int] = None
    tor: Optional[FgModule] = None
    reason: str = ""


@dataclass
class ConditionVerdict:
    cells: Dict[Tuple[int, int], CellVerdict] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.cells.values())

    @property
    def status(self) -> str:
        return "guaranteed" if self.passed else "not guaranteed"

    def failures(self) -> List[CellVerdict]:
        return [c for c in self.cells.values() if not c.ok]

    def tag(self, k: int, l: int) -> str:
        c = self.cells[(k, l)]
        return c.tag if c.ok else f"{c.tag}-FAIL"

    def summary(self) -> str:
        lines = [f"conditions: {self.status}"]
        for (k, l), c in sorted(self.cells.items()):
            if k == 0 or l == 0 or c.tag == "vacant":
                if c.ok:
                    continue
            extra = f" Tor={c.tor}" if c.tor is not None else ""
            note = f" ({c.reason})" if c.reason else ""
            lines.append(f"  ({k},{l}): {self.tag(k, l)}{extra}{note}")
        return "\n".join(lines)


LinkData = Mapping[Tuple[str, int], Union[GradedModule, Sequence[GradedModule]]]


def _as_list(x) -> List[GradedModule]:
    if x is None:
        return []
    if isinstance(x, GradedModule):
        return [x]
    return list(x)


def classify_conditions(
    p: Perversity,
    q: Perversity,
    Q: ProductPerversity,
    link_homologies: Optional[LinkData] = None,
    ring: Ring = ZZ,
    occupied: Optional[Tuple[Iterable[int], Iterable[int]]] = None,
) -> ConditionVerdict:
    """Tag every cell of ``Q`` with the case of the theorem it falls under.

    Shifts are measured against the clamped perversities of
    :func:`normalize_super`.  ``link_homologies`` maps ``("p", k)`` and
    ``("q", l)`` to the intersection homology of the codimension-``k``
    (resp. ``l``) links; it is only consulted for cells claiming the
    torsion-product case over a non-field.  Cells whose codimensions are not
    in ``occupied`` are tagged ``vacant`` and impose nothing.
    """
    pc, qc = normalize_super(p), normalize_super(q)
    links = link_homologies or {}
    occ_x = set(occupied[0]) if occupied else None
    occ_y = set(occupied[1]) if occupied else None
    verdict = ConditionVerdict()
    for k in range(Q.m + 1):
        for l in range(Q.n + 1):
            if occ_x is not None and (k not in occ_x or l not in occ_y):
                verdict.cells[(k, l)] = CellVerdict(k, l, "vacant", True)
                continue
            val = Q(k, l)
            if k == 0 and l == 0:
                ok = val == 0
                verdict.cells[(k, l)] = CellVerdict(k, l, "1", ok, reason="" if ok else "Q(0,0) != 0")
                continue
            if l == 0 or k == 0:
                raw, clamped = (p(k), pc(k)) if l == 0 else (q(l), qc(l))
                ok = val in (raw, clamped)
                verdict.cells[(k, l)] = CellVerdict(
                    k, l, "1", ok, reason="" if ok else f"boundary value {val}, expected {raw}"
                )
                continue
            s = val - pc(k) - qc(l)
            supers = int(pc(k) == k - 1) + int(qc(l) == l - 1)
            allowed = {0: (0, 1, 2), 1: (0, 1), 2: (0,)}[supers]
            if s not in (0, 1, 2):
                verdict.cells[(k, l)] = CellVerdict(k, l, "violation", False, s, reason=f"shift {s}")
                continue
            tag = "2" + "abc"[s]
            if s not in allowed:
                verdict.cells[(k, l)] = CellVerdict(
                    k, l, tag, False, s, reason=f"shift {s} excluded for a super perversity"
                )
                continue
            if s < 2 or ring.is_field:
                verdict.cells[(k, l)] = CellVerdict(k, l, tag, True, s)
                continue
            lp, lq = _as_list(links.get(("p", k))), _as_list(links.get(("q", l)))
            if not lp or not lq:
                raise PerversityError(f"missing link homology for cell ({k},{l})")
            tor = FgModule.zero(ring)
            for a in lp:
                for b in lq:
                    tor = tor + torsion_product(a[k - 2 - pc(k)], b[l - 2 - qc(l)])
            verdict.cells[(k, l)] = CellVerdict(k, l, tag, tor.is_zero, s, tor)
    return verdict


def is_locally_torsion_free(
    link_homologies: Mapping[int, Union[GradedModule, Sequence[GradedModule]]],
    p: Perversity,
    ring: Ring = ZZ,
) -> bool:
    if ring.is_field:
        return True
    for k, mods in link_homologies.items():
        for h in _as_list(mods):
            if h[k - 2 - p(k)].torsion:
                return False
    return True
