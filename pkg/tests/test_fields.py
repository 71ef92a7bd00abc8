import random

import pytest
from hypothesis import given, settings, strategies as st

from dlplab.algebra import field_create, Poly, is_irreducible
from dlplab.algebra.fields import F2, field_desc, gf


def test_field_create_f2_12():
    F = field_create(2, [(12, (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1))])
    assert F.order == 4096


def test_field_create_identity_tower():
    F = field_create(2, [(1, (1, 1))])  # degree-1 extension: still F_2
    assert F.order == 2
    assert F.mul(1, 1) == 1


def test_field_create_rejects_reducible():
    with pytest.raises(ValueError):
        field_create(2, [(2, (1, 0, 1))])  # X^2 + 1 = (X+1)^2


def test_tower_f2_12_over_f2_6():
    # F_{2^12} as a quadratic extension of F_{2^6} by V^2 + tV + 1
    F64 = field_create(2, [(6, (1, 1, 0, 0, 0, 0, 1))])
    F = field_create(2, [(6, (1, 1, 0, 0, 0, 0, 1)), (2, (1, 2, 1))])
    assert F.order == 4096
    rng = random.Random(3)
    for _ in range(40):
        a = F.random_element(rng, nonzero=True)
        assert F.pow(a, 4095) == 1  # multiplicative order divides 4095


def test_frobenius_additivity():
    F = field_create(2, [(4, (1, 1, 0, 0, 1))])
    for a in F.elements():
        for b in (0, 1, 7, 13):
            assert F.sqr(F.add(a, b)) == F.add(F.sqr(a), F.sqr(b))


def test_inverse_and_division():
    F = field_create(2, [(4, (1, 1, 0, 0, 1))])
    for a in range(1, 16):
        assert F.mul(a, F.inv(a)) == 1


def test_table_vs_generic_mul():
    F = field_create(2, [(6, (1, 1, 0, 0, 0, 0, 1))])
    F.ensure_tables()
    rng = random.Random(5)
    for _ in range(300):
        a, b = rng.randrange(64), rng.randrange(64)
        assert F.mul(a, b) == F._mul_generic(a, b)


def test_subfield_membership_and_elements():
    F = field_create(2, [(4, (1, 1, 0, 0, 1))])
    f4 = F.subfield_elements(4)
    assert len(f4) == 4
    for a in f4:
        assert F.pow(a, 4) == a
    assert set(F.subfield_elements(2)) == {0, 1}


def test_embedding_is_identity_on_ints():
    F64 = field_create(2, [(6, (1, 1, 0, 0, 0, 0, 1))])
    F = F64.extension((1, 2, 1))
    # low-order ints are the subfield elements, arithmetic must agree
    rng = random.Random(6)
    for _ in range(100):
        a, b = rng.randrange(64), rng.randrange(64)
        assert F.mul(a, b) == F64.mul(a, b)
        assert F.add(a, b) == F64.add(a, b)


def test_root_q():
    F = field_create(2, [(6, (1, 1, 0, 0, 0, 0, 1))])
    for a in range(64):
        r = F.root_q(a, 4)
        assert F.pow(r, 4) == a


def test_frobenius_order_at_top():
    F = field_create(2, [(4, (1, 1, 0, 0, 1))])
    for a in F.elements():
        assert F.frobenius(a, F.degree) == a


def test_coeff_subfield_degree():
    F = field_create(2, [(4, (1, 1, 0, 0, 1))])
    assert F.coeff_subfield_degree(0) == 1
    assert F.coeff_subfield_degree(1) == 1
    degs = {F.coeff_subfield_degree(a) for a in F.elements()}
    assert degs == {1, 2, 4}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 4095), st.integers(0, 4095), st.integers(0, 4095))
def test_field_axioms_f2_12(a, b, c):
    F = field_desc(2, ((12, (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1)),))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
