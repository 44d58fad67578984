import pytest

from ihkunneth.exactalg import ZZ, GradedModule
from ihkunneth.library import circle, parse_expression, point, projective_plane, sphere0, torus
from ihkunneth.stratcomplex import (
    EMPTY,
    BifilteredComplex,
    FilteredComplex,
    barycentric_subdivision,
    cone,
    disjoint_union,
    ensure_full,
    is_isomorphic,
    join,
    normal_link,
    ordinary_homology,
    product,
    suspension,
    validate_pseudomanifold,
    vertex_link,
)

from oracles import faces, interior_label

G = GradedModule.parse


def brute_stratum_dims(X, s):
    out = {}
    for t in faces(s):
        lam = interior_label(X.labels, t)
        out[lam] = max(out.get(lam, -1), len(t) - 1)
    return out


def test_cone_on_rp2_counts():
    X = cone(projective_plane())
    assert X.num_vertices == 7
    assert len(X.simplices_of_dim(3)) == 10
    assert X.labels[-1] == (3,)
    assert X.occupied_codims() == [0, 3]


def test_cone_of_empty_is_point():
    assert cone(EMPTY).f_vector() == [1]


def test_suspension_and_homology():
    S = suspension(projective_plane())
    assert S.num_vertices == 8 and S.dim == 3
    assert ordinary_homology(S) == G("(Z, 0, Z/2)")
    assert ordinary_homology(torus()) == G("(Z, Z^2, Z)")


def test_product_counts_and_labels():
    P = product(cone(circle()), cone(circle()))
    assert isinstance(P, BifilteredComplex)
    assert P.num_vertices == 16 and P.dim == 4
    # each pair of triangles gives C(4,2) = 6 staircase simplices
    assert len(P.simplices_of_dim(4)) == 9 * 6
    assert set(P.labels) == {(0, 0), (0, 2), (2, 0), (2, 2)}
    assert not P.fullness_violations()
    assert ordinary_homology(product(circle(), circle())) == G("(Z, Z^2, Z)")


@pytest.mark.parametrize("expr", ["cone(rp2)", "susp(t2)", "product(cone(s1),cone(s1))", "join(s1,s0)"])
def test_stratum_dims_match_face_enumeration(expr):
    X = parse_expression(expr)
    for s in X.all_simplices():
        assert X.stratum_dims(s) == brute_stratum_dims(X, s)


@pytest.mark.parametrize("a,b", [("s0", "s0"), ("s1", "s0"), ("pt", "s1"), ("s1", "s1")])
def test_join_is_link_of_apex_pair(a, b):
    L1, L2 = parse_expression(a), parse_expression(b)
    J = join(L1, L2)
    Z = product(cone(L1), cone(L2))
    assert is_isomorphic(J, vertex_link(Z, Z.num_vertices - 1))
    assert J.apex_label == (L1.dim + 1, L2.dim + 1)
    assert J.dim == L1.dim + L2.dim + 1


def test_join_of_spheres_is_sphere():
    assert ordinary_homology(join(circle(), sphere0())) == G("(Z, 0, Z)")
    assert ordinary_homology(join(circle(), circle())) == G("(Z, 0, 0, Z)")
    assert ordinary_homology(join(point(), circle())).ranks() == [1]


def test_vertex_and_normal_links():
    X = cone(torus())
    L = vertex_link(X, X.num_vertices - 1)
    assert is_isomorphic(L, torus())
    S = suspension(projective_plane())
    # the link of a regular vertex of a 3-manifold point is a 2-sphere
    assert ordinary_homology(vertex_link(S, 0)) == G("(Z, 0, Z)")
    # along the stratum pole x S^1 of susp(t2) x S^1 the normal link is the torus
    P = product(suspension(torus()), circle())
    v = next(i for i, lab in enumerate(P.labels) if lab == (3, 0))
    N = normal_link(P, v)
    assert N.dim == 2 and ordinary_homology(N) == G("(Z, Z^2, Z)")


def test_subdivision_preserves_homology_and_strata():
    X = cone(projective_plane())
    Y = barycentric_subdivision(X)
    assert ordinary_homology(Y) == ordinary_homology(X)
    assert Y.occupied_codims() == X.occupied_codims()
    assert not Y.fullness_violations()


def test_validation_reports():
    assert validate_pseudomanifold(cone(torus())).ok
    bad = FilteredComplex.from_facets(2, [(0,), (1,), (0,)], [(0, 1, 2)])
    rep = validate_pseudomanifold(bad)
    assert not rep.no_codim_one and not rep.ok
    unpure = FilteredComplex.from_facets(2, [(0,)] * 4, [(0, 1, 2), (2, 3)])
    assert not validate_pseudomanifold(unpure).pure


def test_fullness_repair():
    # an edge joining two cone points spans a simplex too big for the 0-skeleton
    X = FilteredComplex.from_facets(2, [(2,), (2,), (0,)], [(0, 1, 2)])
    assert X.fullness_violations()
    Y, changed = ensure_full(X)
    assert changed and not Y.fullness_violations()


def test_construction_errors():
    with pytest.raises(ValueError):
        FilteredComplex.from_facets(1, [(0,), (0,)], [(0, 0)])
    with pytest.raises(ValueError):
        FilteredComplex.from_facets(1, [(0,), (0,)], [(0, 5)])
    with pytest.raises(ValueError):
        FilteredComplex.from_facets(1, [(0,), (0, 1)], [(0, 1)])
    with pytest.raises(ValueError):
        FilteredComplex.from_facets(1, [(0,)] * 3, [(0, 1, 2)])
    with pytest.raises(ValueError):
        join(EMPTY, EMPTY)


def test_disjoint_union():
    U = disjoint_union(circle(), circle())
    assert ordinary_homology(U) == G("(Z^2, Z^2)")
