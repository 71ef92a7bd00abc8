import random

import pytest

from dlplab.algebra import Poly, factor, field_create, poly_to_text
from dlplab.field_rep import (
    FieldRep,
    find_representation,
    verify_representation,
    rep_defining_poly,
    discover_subgroup_order,
    factor_integer,
    SearchExhausted,
)


def test_desk_rep_invariants(desk_rep):
    ok, diags = verify_representation(desk_rep, expect_n=29)
    assert ok, diags
    # defining divisibility holds exactly
    T = rep_defining_poly(desk_rep.field, 16, desk_rep.h0, desk_rep.h1)
    assert (T % desk_rep.I).is_zero
    assert T.deg <= 16 * 2 + 1


def test_perturbed_h1_fails(desk_rep, f16):
    bad = FieldRep(field=f16, q=16, k=1, n=29, d_h=2, h0=desk_rep.h0,
                   h1=desk_rep.h1 + Poly.one(f16), I=desk_rep.I)
    ok, diags = verify_representation(bad)
    assert not ok
    assert any("divisible" in d for d in diags)


def test_wrong_n_flagged(desk_rep, f16):
    T = rep_defining_poly(f16, 16, desk_rep.h0, desk_rep.h1)
    cof = next(g for g, _ in factor(T).factors if g.deg not in (0, 29))
    rep_c = FieldRep(field=f16, q=16, k=1, n=cof.deg, d_h=2,
                     h0=desk_rep.h0, h1=desk_rep.h1, I=cof)
    ok, _ = verify_representation(rep_c)
    assert ok  # divisibility holds for the cofactor too
    ok2, diags = verify_representation(rep_c, expect_n=29)
    assert not ok2 and any("differs" in d for d in diags)


def test_isomorphism_roundtrips(desk_rep, rng):
    rep = desk_rep
    # to_x(y) = x^q and h1(y) x = h0(y)
    y = rep.xq()
    h0y, h1y = rep.to_x(rep.h0), rep.to_x(rep.h1)
    assert rep.mul(h1y, rep.x()) == h0y
    for _ in range(25):
        e = rep.random_element(rng)
        num, j = rep.to_y(e)
        assert rep.to_x(num) == rep.mul(e, rep.pow(h1y, j))


def test_search_small_instance(f64):
    rep = find_representation(f64, 4, 3, 5, 1)
    ok, diags = verify_representation(rep, expect_n=5)
    assert ok, diags
    assert max(rep.h0.deg, rep.h1.deg) == 1


def test_search_respects_subfield(f16):
    rep = find_representation(f16, 16, 1, 21, 2, subfield_order=2)
    assert rep.subfield_degree() == 1
    for c in rep.h0.coeffs() + rep.h1.coeffs():
        assert c in (0, 1)


def test_search_budget_exhaustion(f16):
    with pytest.raises(SearchExhausted):
        find_representation(f16, 16, 1, 33, 2, subfield_order=2, budget=5)


def test_precondition_n_bound(f16):
    with pytest.raises(ValueError):
        find_representation(f16, 16, 1, 40, 2)  # n > q d_h + 1


def test_rep_file_roundtrip(desk_rep):
    text = desk_rep.to_file_text()
    back = FieldRep.from_file_text(text)
    assert back.h0 == desk_rep.h0
    assert back.h1 == desk_rep.h1
    assert back.I == desk_rep.I
    assert back.r == desk_rep.r and back.c == desk_rep.c
    assert back.field is desk_rep.field


def test_factor_integer_and_r_discovery():
    fac = factor_integer(2**48 - 1)
    prod = 1
    for p, e in fac.items():
        prod *= p**e
    assert prod == 2**48 - 1
    r = discover_subgroup_order(16**29 - 1, bound=1 << 48)
    assert r == 536903681


def test_r_invariants(desk_rep):
    assert (desk_rep.order - 1) % desk_rep.r == 0
    assert desk_rep.c * desk_rep.r == desk_rep.order - 1
