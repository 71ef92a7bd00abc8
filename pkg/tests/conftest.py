"""Shared fixtures: pinned desk instances, built once per session.

The q=16 desk representation uses a pinned (h0, h1) pair found by the
weight-ordered search (the acceptance suite re-runs the search itself);
building from the pinned pair keeps the unit tests fast.
"""

import random

import pytest

from dlplab.algebra import Poly, factor, field_create
from dlplab.field_rep import FieldRep, rep_defining_poly
from dlplab.relations import FactorBase, orbit_reduce, small_degree_relations_k1
from dlplab.solver import pick_generator, solve_factor_base_logs, logdb_lookup_fn

DESK_R = 536903681  # largest prime <= 2^48 dividing 16^29 - 1


@pytest.fixture(scope="session")
def f16():
    return field_create(2, [(4, (1, 1, 0, 0, 1))])


@pytest.fixture(scope="session")
def f4():
    return field_create(2, [(2, (1, 1, 1))])


@pytest.fixture(scope="session")
def f64():
    return field_create(2, [(6, (1, 1, 0, 0, 0, 0, 1))])


@pytest.fixture(scope="session")
def f256():
    return field_create(2, [(8, (1, 0, 1, 1, 1, 0, 0, 0, 1))])


@pytest.fixture(scope="session")
def f4096():
    return field_create(2, [(12, (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1))])


@pytest.fixture(scope="session")
def desk_rep(f16):
    """q=16, k=1, n=29, d_h=2 over F_16 with the desk subgroup order."""
    h0 = Poly.from_coeffs(f16, [1])
    h1 = Poly.from_coeffs(f16, [7, 1, 2])
    T = rep_defining_poly(f16, 16, h0, h1)
    I = next(g for g, _ in factor(T).factors if g.deg == 29)
    rep = FieldRep(field=f16, q=16, k=1, n=29, d_h=2, h0=h0, h1=h1, I=I)
    rep.set_subgroup(DESK_R)
    return rep


@pytest.fixture(scope="session")
def desk_rep21(f16):
    """q=16, k=1, n=21 with h0, h1 over F_2 (subfield-defined, for orbits)."""
    h0 = Poly.from_coeffs(f16, [0, 1])
    h1 = Poly.from_coeffs(f16, [1, 0, 1])
    T = rep_defining_poly(f16, 16, h0, h1)
    I = next(g for g, _ in factor(T).factors if g.deg == 21)
    return FieldRep(field=f16, q=16, k=1, n=21, d_h=2, h0=h0, h1=h1, I=I)


@pytest.fixture(scope="session")
def desk_pipeline(desk_rep):
    """Factor base, relations, and solved logarithms for the desk instance."""
    fb = FactorBase.build(desk_rep, 3)
    orbit_reduce(fb, desk_rep)
    g = pick_generator(desk_rep, fb)
    rels, stats = small_degree_relations_k1(
        desk_rep, fb, 3, want=int(len(fb.representatives) * 1.25) + 32)
    logdb = solve_factor_base_logs(desk_rep, fb, rels, g, seed=1)
    lookup = logdb_lookup_fn(desk_rep, fb, logdb)
    return {"fb": fb, "g": g, "relations": rels, "stats": stats,
            "logdb": logdb, "lookup": lookup}


@pytest.fixture()
def rng():
    return random.Random(0xD15C0)
