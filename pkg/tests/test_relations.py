import math
import random

import pytest

from dlplab.algebra import Poly, factor, is_irreducible, splits_completely, irreducible_count
from dlplab.field_rep import find_representation, discover_subgroup_order
from dlplab.relations import (
    FactorBase,
    Relation,
    bluher_set,
    bluher_count_formula,
    splitting_set,
    degree1_relations,
    degree2_systems,
    small_degree_relations_k1,
    orbit_reduce,
    orbit_count_formula,
    verify_relation,
    b2u_elements,
    expand_h1,
    y_factor_to_x,
    _left_quartic,
)


def test_bluher_counts_small(f64, f256):
    from dlplab.algebra import field_create

    F32 = field_create(2, [(5, (1, 0, 1, 0, 0, 1))])
    assert len(bluher_set(f64, 4)) == bluher_count_formula(4, 3) == 1
    assert len(bluher_set(f256, 4)) == bluher_count_formula(4, 4) == 4
    assert len(bluher_set(F32, 2)) == bluher_count_formula(2, 5) == 5


def test_s2_exact_counts(f4, f16):
    assert len(splitting_set(f4, 2, 2)) == 2**3 - 2**2
    s = splitting_set(f16, 4, 2)
    assert len(s) == 4**3 - 4**2
    # every member splits with distinct roots; verified directly
    for a, b, c in list(s.triples)[:64]:
        assert splits_completely(_left_quartic(f16, 4, a, b, c))


def test_s3_against_exhaustive_sample(f64, rng):
    s = splitting_set(f64, 4, 3)
    members = set(s.triples)
    # spot-verify membership & non-membership on a random sample (the full
    # 2^18 sweep runs in the acceptance suite)
    for _ in range(1500):
        a, b, c = rng.randrange(64), rng.randrange(64), rng.randrange(64)
        assert splits_completely(_left_quartic(f64, 4, a, b, c)) == ((a, b, c) in members)


def test_degree1_relations_verify(f64):
    rep = find_representation(f64, 4, 3, 5, 1)
    rep.set_subgroup(discover_subgroup_order(rep.order - 1))
    fb = FactorBase.build(rep, 1)
    sk = splitting_set(f64, 4, 3)
    rels, stats = degree1_relations(rep, fb, sk, budget=600, sample_seed=1)
    assert len(rels) > 100
    for rel in rels[::11]:
        assert verify_relation(rep, fb, rel)
    # right side has degree d_h + 1: the h1 exponent is always 1
    assert all(rel.h1_exp == 1 for rel in rels)


def test_degree1_rate_near_heuristic(f64):
    rep = find_representation(f64, 4, 3, 5, 1)
    fb = FactorBase.build(rep, 1)
    sk = splitting_set(f64, 4, 3)
    rels, stats = degree1_relations(rep, fb, sk, budget=1200, sample_seed=7)
    expected = 0.5  # 1/(d_h+1)! with d_h = 1
    sigma = math.sqrt(expected * (1 - expected) / stats.trials)
    assert abs(stats.rate - expected) <= 3 * sigma


def test_k1_pencil_relations(desk_rep, desk_pipeline):
    rels = desk_pipeline["relations"]
    fb = desk_pipeline["fb"]
    assert len(rels) >= len(fb.representatives)
    for rel in rels[::73]:
        assert verify_relation(desk_rep, fb, rel)


def test_k1_trivial_pair_degenerates(desk_rep):
    fb = FactorBase.build(desk_rep, 3)
    rels, _ = small_degree_relations_k1(desk_rep, fb, 3, budget=1)
    assert rels == []  # (F, G) = (X, 1): both sides expand to x^q - x


def test_b2u_count(f16, f64):
    # exactly q^k/2 irreducibles X^2 + uX + v for each u != 0
    for field in (f16, f64):
        u = 3
        assert len(b2u_elements(field, u)) == field.order // 2
    assert b2u_elements(f16, 0) == []


def test_degree2_systems(f16):
    rep = find_representation(f16, 4, 2, 7, 2)
    rep.set_subgroup(discover_subgroup_order(rep.order - 1, bound=1 << 48))
    fb = FactorBase.build(rep, 2)
    sk = splitting_set(f16, 4, 2)
    with pytest.raises(ValueError):
        degree2_systems(rep, fb, 0, sk)
    rels, stats = degree2_systems(rep, fb, 3, sk, budget=48)
    assert stats.trials == 48
    for rel in rels:
        assert verify_relation(rep, fb, rel)
        assert rel.h1_exp == 2


def test_orbit_reduce_subfield_defined(desk_rep21):
    rep = desk_rep21
    fb = FactorBase.build(rep, 2)
    orbit_reduce(fb, rep)
    assert fb.frob_j0 == (rep.n % 4)
    # orbit lengths divide 4 * deg; member identity member = rep^(2^(sn j))
    for i in range(len(fb)):
        ridx, j = fb.orbit_rep[i], fb.orbit_exp[i]
        d = fb.elements[i].deg
        orbit = [t for t in range(len(fb)) if fb.orbit_rep[t] == ridx]
        assert (4 * d) % len(orbit) == 0
        lhs = fb.elements[i]
        rhs = rep.pow(fb.elements[ridx], pow(2, fb.frob_sn * j))
        assert lhs == rhs
    # the element x (= X + 0 with subfield coefficients) is a fixed point
    x_idx = fb.index_of(Poly.from_coeffs(rep.field, [0, 1]))
    assert fb.orbit_rep[x_idx] == x_idx
    assert len([t for t in range(len(fb)) if fb.orbit_rep[t] == x_idx]) == 1


def test_orbit_identity_partition_for_full_field_rep(desk_rep):
    fb = FactorBase.build(desk_rep, 1)
    orbit_reduce(fb, desk_rep)
    assert fb.frob_j0 == 0
    assert list(fb.representatives) == list(range(len(fb)))


def test_orbit_count_published_instance():
    # 2^24 degree-1 elements fall into 699252 orbits under a -> a^(2^7)
    assert orbit_count_formula(2, 24, 7) == 699252


def test_expand_h1(desk_rep, desk_pipeline):
    fb = desk_pipeline["fb"]
    ent, unit = expand_h1(desk_rep, fb)
    # h1(y) equals unit * prod elements^exponents
    lhs = desk_rep.to_x(desk_rep.h1)
    rhs = Poly.constant(desk_rep.field, unit)
    for idx, e in ent:
        rhs = desk_rep.mul(rhs, desk_rep.pow(fb.elements[idx], e))
    assert lhs == rhs


def test_relation_line_roundtrip():
    rel = Relation(entries=((3, 1), (17, -16)), h1_exp=2, unit=5, provenance="deg1(a=1,b=2,c=3)")
    back = Relation.from_line(rel.to_line())
    assert back == rel
