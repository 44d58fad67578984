"""Builtin spaces, space expressions and the plain-text space file format.

A space file has one record per line; ``#`` starts a comment::

    name s1
    dim 1
    vertex a 1
    vertex b 1
    vertex c 1
    simplex a b
    simplex b c
    simplex a c

``vertex <id> <skeleton>`` puts the vertex in ``X^skeleton`` minus the
next skeleton down.  Bifiltered complexes add the codimension pair:
``vertex <id> <skeleton> <k> <l>``.  A file may instead consist of
``product <expr> <expr>`` (plus optional ``name``), built from expressions.
"""

from __future__ import annotations

import itertools
import logging
import os
import re
from typing import Callable, Dict, List, Optional, Tuple

from .stratcomplex import (
    EMPTY,
    FilteredComplex,
    barycentric_subdivision,
    cone,
    disjoint_union,
    ensure_full,
    join,
    normal_link,
    product,
    suspension,
)

log = logging.getLogger(__name__)


class SpaceError(ValueError):
    pass


class SpaceFileError(SpaceError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


# ---------------------------------------------------------------------------
# Builtins


def point() -> FilteredComplex:
    return FilteredComplex.trivially_filtered(0, 1, [(0,)], name="pt")


def sphere0() -> FilteredComplex:
    return FilteredComplex.trivially_filtered(0, 2, [(0,), (1,)], name="s0")


def circle() -> FilteredComplex:
    return FilteredComplex.trivially_filtered(1, 3, [(0, 1), (1, 2), (0, 2)], name="s1")


def sphere2() -> FilteredComplex:
    """Octahedron; vertices ``2i`` and ``2i+1`` are antipodal."""
    facets = list(itertools.product((0, 1), (2, 3), (4, 5)))
    return FilteredComplex.trivially_filtered(2, 6, facets, name="s2")


def torus() -> FilteredComplex:
    """Moebius' 7-vertex torus."""
    facets = []
    for i in range(7):
        facets.append((i, (i + 1) % 7, (i + 3) % 7))
        facets.append((i, (i + 2) % 7, (i + 3) % 7))
    return FilteredComplex.trivially_filtered(2, 7, facets, name="t2")


def projective_plane() -> FilteredComplex:
    """6-vertex real projective plane (half of the icosahedron)."""
    facets = [
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
        (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
    ]
    return FilteredComplex.trivially_filtered(2, 6, facets, name="rp2")


def two_circles() -> FilteredComplex:
    X = disjoint_union(circle(), circle())
    return FilteredComplex.from_facets(1, X.labels, X.facets, name="2s1")


BUILTINS: Dict[str, Callable[[], FilteredComplex]] = {
    "pt": point,
    "point": point,
    "empty": lambda: EMPTY,
    "s0": sphere0,
    "s1": circle,
    "s2": sphere2,
    "t2": torus,
    "rp2": projective_plane,
    "2s1": two_circles,
    "two-circles": two_circles,
}

LINK_LIBRARY = ("pt", "s0", "s1", "2s1", "s2", "t2", "rp2")


# ---------------------------------------------------------------------------
# Expressions


_TOKEN = re.compile(r"\s*([A-Za-z0-9_.\-/+]+|[(),])")


def _tokens(text: str) -> List[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpaceError(f"unexpected character {text[pos]!r} in {text!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def _named(name: str, X: FilteredComplex) -> FilteredComplex:
    return FilteredComplex.from_facets(X.dim, X.labels, X.facets, X.names, name=name, apex_label=X.apex_label)


def _apply(fn: str, args: List[FilteredComplex], extra: List[str]) -> FilteredComplex:
    unary = {"cone": cone, "susp": suspension, "suspension": suspension, "sd": barycentric_subdivision}
    binary = {"join": join, "product": product, "disjoint": disjoint_union}
    if fn in unary and len(args) == 1 and not extra:
        return unary[fn](args[0])
    if fn in binary and len(args) == 2 and not extra:
        return binary[fn](*args)
    if fn == "link" and len(args) == 1 and len(extra) == 1:
        X = args[0]
        try:
            v = int(extra[0])
        except ValueError:
            v = X.names.index(extra[0]) if extra[0] in X.names else -1
        if not 0 <= v < X.num_vertices:
            raise SpaceError(f"link: no vertex {extra[0]!r}")
        return normal_link(X, v)
    raise SpaceError(f"bad call {fn}() with {len(args)} space argument(s)")


def parse_expression(text: str, base_dir: Optional[str] = None) -> FilteredComplex:
    """Evaluate ``cone(rp2)``, ``product(susp(rp2), s2)``, a builtin name or a space file path."""
    toks = _tokens(text)
    pos = 0

    def atom() -> Tuple[Optional[FilteredComplex], str]:
        nonlocal pos
        if pos >= len(toks):
            raise SpaceError(f"unexpected end of expression {text!r}")
        tok = toks[pos]
        pos += 1
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            spaces, extra = [], []
            while True:
                sub, raw = atom()
                if sub is None:
                    extra.append(raw)
                else:
                    spaces.append(sub)
                if pos >= len(toks):
                    raise SpaceError(f"missing ')' in {text!r}")
                if toks[pos] == ",":
                    pos += 1
                    continue
                if toks[pos] == ")":
                    pos += 1
                    break
                raise SpaceError(f"unexpected {toks[pos]!r} in {text!r}")
            X = _apply(tok, spaces, extra)
            return _named(f"{tok}(" + ",".join([s.name for s in spaces] + extra) + ")", X), tok
        if tok in BUILTINS:
            return BUILTINS[tok](), tok
        path = os.path.join(base_dir, tok) if base_dir and not os.path.isabs(tok) else tok
        if os.path.isfile(path):
            return load_space(path), tok
        if re.fullmatch(r"\d+", tok):
            return None, tok
        raise SpaceError(f"unknown space {tok!r}")

    X, raw = atom()
    if X is None or pos != len(toks):
        raise SpaceError(f"could not parse space expression {text!r}")
    return X


# ---------------------------------------------------------------------------
# Space files


def parse_space(text: str, base_dir: Optional[str] = None) -> FilteredComplex:
    name, dim = "", None
    vertices: Dict[str, int] = {}
    labels: List[Tuple[int, ...]] = []
    facets: List[Tuple[int, ...]] = []
    factors: Optional[Tuple[str, str]] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "name":
            name = " ".join(rest)
        elif key == "dim":
            if len(rest) != 1 or not re.fullmatch(r"-?\d+", rest[0]):
                raise SpaceFileError(lineno, "dim takes one integer")
            dim = int(rest[0])
        elif key == "vertex":
            if dim is None:
                raise SpaceFileError(lineno, "dim must precede vertex records")
            if len(rest) not in (2, 4):
                raise SpaceFileError(lineno, "expected 'vertex <id> <skeleton> [<k> <l>]'")
            vid = rest[0]
            if vid in vertices:
                raise SpaceFileError(lineno, f"duplicate vertex id {vid!r}")
            try:
                nums = [int(x) for x in rest[1:]]
            except ValueError:
                raise SpaceFileError(lineno, f"vertex {vid!r}: non-integer field") from None
            skel = nums[0]
            if not 0 <= skel <= dim:
                raise SpaceFileError(lineno, f"vertex {vid!r}: skeleton index {skel} outside [0, {dim}]")
            if len(nums) == 3:
                if nums[1] < 0 or nums[2] < 0 or nums[1] + nums[2] != dim - skel:
                    raise SpaceFileError(lineno, f"vertex {vid!r}: codimension pair does not match skeleton")
                lab = (nums[1], nums[2])
            else:
                lab = (dim - skel,)
            if labels and len(labels[0]) != len(lab):
                raise SpaceFileError(lineno, f"vertex {vid!r}: mixed label widths")
            vertices[vid] = len(labels)
            labels.append(lab)
        elif key == "simplex":
            try:
                f = tuple(vertices[v] for v in rest)
            except KeyError as exc:
                raise SpaceFileError(lineno, f"unknown vertex {exc.args[0]!r}") from None
            if not f:
                raise SpaceFileError(lineno, "empty simplex")
            if len(set(f)) != len(f):
                raise SpaceFileError(lineno, "repeated vertex in simplex")
            if dim is not None and len(f) - 1 > dim:
                raise SpaceFileError(lineno, f"simplex of dimension {len(f) - 1} exceeds dim {dim}")
            facets.append(f)
        elif key == "product":
            if len(rest) != 2:
                raise SpaceFileError(lineno, "expected 'product <expr> <expr>'")
            factors = (rest[0], rest[1])
        else:
            raise SpaceFileError(lineno, f"unknown record {key!r}")
    if factors:
        if vertices:
            raise SpaceError("a product file cannot also list vertices")
        X = product(parse_expression(factors[0], base_dir), parse_expression(factors[1], base_dir))
        return _named(name or X.name, X)
    if dim is None:
        raise SpaceError("missing dim record")
    if not vertices:
        raise SpaceError("no vertices")
    names = sorted(vertices, key=vertices.get)
    X = FilteredComplex.from_facets(dim, labels, facets, names, name=name)
    X, repaired = ensure_full(X)
    if repaired:
        log.warning("%s: subdivided once to make skeleta full", name or "space")
    return X


def load_space(path: str) -> FilteredComplex:
    with open(path, encoding="utf-8") as fh:
        return parse_space(fh.read(), os.path.dirname(os.path.abspath(path)))


def serialize_space(X: FilteredComplex) -> str:
    ids = list(X.names)
    if len(set(ids)) != len(ids) or any(not re.fullmatch(r"[^\s#]+", i) for i in ids):
        ids = [f"v{i}" for i in range(X.num_vertices)]
    lines = [f"name {X.name}" if X.name else "# unnamed", f"dim {X.dim}"]
    for v, lab in enumerate(X.labels):
        extra = "" if len(lab) == 1 else " " + " ".join(map(str, lab))
        lines.append(f"vertex {ids[v]} {X.dim - sum(lab)}{extra}")
    for f in X.facets:
        lines.append("simplex " + " ".join(ids[v] for v in f))
    return "\n".join(lines) + "\n"
