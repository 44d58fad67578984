import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ihkunneth.exactalg import GF, QQ, ZZ, GradedModule
from ihkunneth.perversity import (
    Perversity,
    PerversityError,
    classify_conditions,
    is_locally_torsion_free,
    make_product_perversity,
    normalize_super,
    parse_perversity,
    preset,
)

G = GradedModule.parse


def test_presets():
    assert preset("zero", 4).values == (0, 0, 0, 0, 0)
    assert preset("lower-middle", 6).values == (0, 0, 0, 0, 1, 1, 2)
    assert preset("upper-middle", 6).values == (0, 0, 0, 1, 1, 2, 2)
    assert preset("top", 4).values == (0, 0, 0, 1, 2)
    assert preset("lower-middle", 6).dual() == Perversity((0, -1, 0, 1, 1, 2, 2))
    with pytest.raises(PerversityError):
        preset("middle", 3)


def test_flags():
    assert preset("upper-middle", 5).traditional
    assert not Perversity((0, 0, 1)).within_range
    assert Perversity((0, 0, 1)).super_at(2)
    assert Perversity((0, 5)).within_range  # codimension one is ignored
    assert not Perversity((0, 0, 2, 1)).gm_growth
    assert Perversity((0, 0, 0)) <= Perversity((0, 0, 1))


def test_parse_and_errors():
    assert parse_perversity("0,0,1", 4).values == (0, 0, 1, 1, 1)
    assert str(parse_perversity("upper-middle", 3)) == "(0,0,0,1)"
    with pytest.raises(PerversityError):
        Perversity((1, 0))
    with pytest.raises(PerversityError):
        parse_perversity("a,b", 2)
    with pytest.raises(PerversityError):
        Perversity((0, 0))(5)


def test_normalize_super_clamps():
    assert normalize_super(Perversity((0, 3, 4, 1, 9))).values == (0, 0, 1, 1, 3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-3, 6), min_size=1, max_size=6))
def test_normalize_idempotent_and_below(vals):
    p = Perversity(tuple([0] + vals))
    c = normalize_super(p)
    assert normalize_super(c) == c and c <= p
    assert all(c(k) <= k - 1 for k in range(1, c.max_codim + 1))


def test_product_modes():
    p = preset("upper-middle", 3)
    q = preset("zero", 2)
    S = make_product_perversity("sum", p, q)
    assert (S.m, S.n) == (3, 2) and S(3, 2) == 1
    K = make_product_perversity("king", p, q)
    assert K(3, 2) == 1 and K(0, 2) == 0
    sh = make_product_perversity("shift", p, q, shifts={(3, 2): 2})
    assert sh(3, 2) == 3 and sh(2, 2) == 0 and sh(3, 0) == 1
    C = make_product_perversity("cgj", preset("lower-middle", 5), m=3, n=2)
    assert C(2, 2) == 1 and C(3, 2) == 1
    with pytest.raises(PerversityError):
        make_product_perversity("cgj", p, q)
    with pytest.raises(PerversityError):
        make_product_perversity("shift", p, q, shifts=3)
    with pytest.raises(PerversityError):
        make_product_perversity("bogus", p, q)
    T = make_product_perversity("table", p, q, table=[[0, 0, 0], [0, 0, 0], [0, 0, 0], [1, 1, 2]])
    assert T(3, 2) == 2


def test_classify_sum_is_guaranteed():
    p, q = preset("zero", 3), preset("zero", 2)
    v = classify_conditions(p, q, make_product_perversity("sum", p, q))
    assert v.passed and v.status == "guaranteed"
    assert v.tag(2, 2) == "2a" and v.tag(3, 0) == "1"


def test_classify_shift_two_needs_tor():
    p, q = preset("zero", 3), preset("zero", 3)
    Q = make_product_perversity("shift", p, q, shifts=2)
    rp2 = G("(Z, Z/2)")
    links = {("p", 3): rp2, ("q", 3): rp2, ("p", 2): G("(Z, Z)"), ("q", 2): G("(Z, Z)")}
    v = classify_conditions(p, q, Q, links, ZZ, occupied=([0, 3], [0, 3]))
    assert not v.passed and v.tag(3, 3) == "2c-FAIL"
    assert v.cells[(3, 3)].tor == FgZ2()
    assert v.tag(2, 2) == "vacant"
    # over a field the torsion product is irrelevant
    assert classify_conditions(p, q, Q, None, QQ, occupied=([0, 3], [0, 3])).passed
    # a torsion-free link makes shift 2 admissible
    links[("q", 3)] = G("(Z, Z^2, Z)")
    assert classify_conditions(p, q, Q, links, ZZ, occupied=([0, 3], [0, 3])).passed


def FgZ2():
    return G("(0, Z/2)")[1]


def test_classify_super_restrictions():
    p = Perversity((0, 0, 1))  # super at codimension 2
    q = preset("zero", 2)
    occ = ([0, 2], [0, 2])
    assert not classify_conditions(p, q, make_product_perversity("shift", p, q, shifts=2), ring=QQ, occupied=occ).passed
    assert classify_conditions(p, q, make_product_perversity("shift", p, q, shifts=1), ring=QQ, occupied=occ).passed
    both = classify_conditions(p, p, make_product_perversity("shift", p, p, shifts=1), ring=QQ, occupied=occ)
    assert both.tag(2, 2) == "2b-FAIL"


def test_classify_boundary_and_origin():
    p, q = preset("zero", 2), preset("zero", 2)
    bad = make_product_perversity("table", p, q, table=[[0, 0, 0], [0, 0, 0], [1, 0, 0]])
    assert bad.table[2][0] == 1
    v = classify_conditions(p, q, bad)
    assert not v.passed and v.tag(2, 0) == "1-FAIL"
    assert "(2,0)" in v.summary()
    with pytest.raises(PerversityError):
        classify_conditions(p, q, make_product_perversity("shift", p, q, shifts=2), {}, ZZ)


def test_locally_torsion_free():
    p = preset("zero", 3)
    assert not is_locally_torsion_free({3: G("(Z, Z/2)")}, p)
    assert is_locally_torsion_free({3: G("(Z, Z/2)")}, p, GF(3))
    assert is_locally_torsion_free({3: G("(Z, Z^2, Z)")}, p)
