import math
import random

import pytest

from dlplab.algebra import Poly, factor, random_irreducible, is_irreducible, field_create
from dlplab.algebra.density import smooth_probability
from dlplab.field_rep import find_representation, discover_subgroup_order
from dlplab.relations import bluher_set, y_factor_to_x
from dlplab.descent import (
    DescentNode,
    DescentTree,
    BilinearInfeasible,
    EliminationFailed,
    TrapDetected,
    bilinear_elim,
    bilinear_static_estimate,
    classical_step,
    continued_fraction_split,
    half_gcd_split,
    default_strategy,
    descend,
    assemble_log,
    detect_trap,
    trap_resolve,
    fly2_elim,
    fly2_lattice,
    lattice_basis,
    q_side,
    eq8_static,
    _verify_node,
    _pow_poly,
)


def test_half_gcd_invariant(desk_rep, rng):
    rep = desk_rep
    for _ in range(20):
        e = rep.random_element(rng)
        num, den = half_gcd_split(rep, e)
        assert num.deg <= (rep.n + 1) // 2
        assert den.deg <= (rep.n + 1) // 2
        # num = den * e mod I at the stopping point
        assert (num + den * e % rep.I) % rep.I == Poly.zero(rep.field) or \
            rep.reduce(num) == rep.mul(den, e)


def test_cf_split(desk_rep, desk_pipeline, rng):
    rep = desk_rep
    g = desk_pipeline["g"]
    target = rep.random_element(rng)
    cf = continued_fraction_split(rep, target, g, 8, 4000, rng)
    lhs = rep.mul(target, rep.pow(g, cf.exponent))
    assert rep.mul(lhs, cf.den) == rep.reduce(cf.num)
    assert cf.num_factors.expand(rep.field) == cf.num
    assert cf.den_factors.expand(rep.field) == cf.den


def test_lattice_basis_properties(f4096, rng):
    # random degree-6 moduli over F_{2^12} with the h-congruence lattice
    h0 = Poly.random_monic(f4096, 5, rng)
    h1 = Poly.random_monic(f4096, 5, rng)
    balanced = 0
    for _ in range(100):
        Q = random_irreducible(f4096, 6, rng)
        try:
            lb = lattice_basis(Q, h0, h1)
        except TrapDetected:
            continue
        for w0, w1 in (lb.v1, lb.v2):
            assert ((w0 * h0 + w1 * h1) % Q).is_zero
        det = lb.determinant()
        assert det.deg == Q.deg  # determinant degree equals d_Q up to unit
        n1, n2 = lb.norms()
        if abs(n1 - 3) <= 1 and abs(n2 - 3) <= 1:
            balanced += 1
    assert balanced >= 95


def test_fly2_lattice_shape(f4096, rng):
    # degree-2 moduli give the ((u0, Y+u1), (Y+v0, v1)) shape generically
    rep = find_representation(f4096, 8, 4, 41, 5, budget=30000)
    shaped = 0
    for _ in range(50):
        Q = random_irreducible(f4096, 2, rng)
        shape, lb = fly2_lattice(rep, q_side(rep, Q))
        if shape is not None:
            shaped += 1
            u0, u1, v0, v1 = shape
            w0 = Poly.from_coeffs(f4096, [v0, 1])
            w1 = Poly.from_coeffs(f4096, [v1, 0])
            # (Y + v0, v1) satisfies the congruence
            assert ((w0 * rep.h0 + Poly.constant(f4096, v1) * rep.h1) % q_side(rep, Q)).is_zero
    assert shaped >= 45


def test_classical_step_degree_bound_example():
    # the published first step: d = 17, a = 5, kappa = 8, d_Q = 26:
    # deg L_v <= 2^(8-5) * 17 + 1 = 137 and deg(R_v / Q) <= 17 + 5*32 - 26 = 151
    d, a, kappa, d_h, d_Q = 17, 5, 8, 5, 26
    assert (1 << (kappa - a)) * d + 1 == 137
    assert d + d_h * (1 << a) - d_Q == 151


def test_classical_step_desk(desk_rep, rng):
    rep = desk_rep
    for _ in range(3):
        P = random_irreducible(rep.field, 8, rng)
        self_exp, edges, h1e, unit, stats = classical_step(rep, P, 5, 2, "v", budget=60000)
        node = DescentNode(poly=P, level="base", degree=8, method="classical",
                           self_exp=self_exp, h1_exp=h1e, unit=unit)
        assert _verify_node(rep, node, edges)
        assert all(p.deg <= 5 for p, _e, _t in edges)


def test_classical_step_w_orientation(desk_rep, rng):
    rep = desk_rep
    done = 0
    for _ in range(6):
        P = random_irreducible(rep.field, 6, rng)
        try:
            self_exp, edges, h1e, unit, stats = classical_step(
                rep, P, 5, 2, "w", budget=60000)
        except EliminationFailed:
            continue
        node = DescentNode(poly=P, level="base", degree=6, method="classical",
                           self_exp=self_exp, h1_exp=h1e, unit=unit)
        assert _verify_node(rep, node, edges)
        done += 1
    assert done >= 1


def test_classical_subfield_closure(desk_rep21, rng):
    """h0, h1 over F_2 and Q over F_4 keep every factor over F_4."""
    rep = desk_rep21
    f16 = rep.field
    f4_elems = set(f16.subfield_elements(4))
    # an irreducible over F_16 with F_4 coefficients
    while True:
        Q = Poly.from_coeffs(f16, [rng.choice(sorted(f4_elems)) for _ in range(6)] + [1])
        if Q.deg == 6 and is_irreducible(Q):
            break
    self_exp, edges, h1e, unit, _ = classical_step(
        rep, Q, 5, 2, "v", budget=200000, subfield_order=4)
    for p, _e, _t in edges:
        assert all(c in f4_elems for c in p.coeffs()), "factor left the subfield"


def test_bilinear_elim_desk(desk_rep, rng):
    rep = desk_rep
    done = 0
    for _ in range(8):
        P = random_irreducible(rep.field, 5, rng)
        try:
            self_exp, edges, h1e, unit, info = bilinear_elim(rep, P, 3, 3)
        except (EliminationFailed, BilinearInfeasible, TrapDetected):
            continue
        node = DescentNode(poly=P, level="base", degree=5, method="bilinear",
                           self_exp=self_exp, h1_exp=h1e, unit=unit)
        assert _verify_node(rep, node, edges)
        assert all(p.deg <= 4 for p, _e, _t in edges)
        done += 1
    assert done >= 4


def test_bilinear_static_gate(desk_rep):
    # the paper-style bound flags infeasible searches before scanning
    v = eq8_static(desk_rep, 4, 1, 8, 1.0)
    assert v < 1
    with pytest.raises((BilinearInfeasible, EliminationFailed, TrapDetected)):
        P = Poly.from_coeffs(desk_rep.field, [3, 1, 4, 1, 5, 1, 2, 6, 1])
        bilinear_elim(desk_rep, P, 4, 1, budget=64)


def test_trap_detection_and_resolution(f256, rng):
    rep = find_representation(f256, 16, 2, 9, 2)
    rep.set_subgroup(discover_subgroup_order(rep.order - 1, bound=1 << 48))
    found = 0
    for c in range(1, 256):
        hc = rep.h1.scale(c) + rep.h0
        if hc.deg < 2:
            continue
        for fp, _m in factor(hc).factors:
            if fp.deg < 2:
                continue
            P = y_factor_to_x(rep, fp)
            assert detect_trap(rep, P) == c
            # the bilinear route must fail (as predicted)
            with pytest.raises((TrapDetected, EliminationFailed, BilinearInfeasible)):
                bilinear_elim(rep, P, max(1, P.deg - 1), 1, budget=128)
            self_exp, edges, h1e, unit = trap_resolve(rep, P)
            node = DescentNode(poly=P, level="base", degree=P.deg, method="trap",
                               self_exp=self_exp, h1_exp=h1e, unit=unit)
            assert _verify_node(rep, node, edges)
            found += 1
        if found >= 12:
            break
    assert found >= 12


def test_trap_numerator_collapse(f256, rng):
    """On a trap, the two-polynomial numerator collapses to
    F(c) G^(q)(Y) + F^(q)(Y) G(c) mod Q."""
    rep = find_representation(f256, 16, 2, 9, 2)
    field = rep.field
    q = rep.q
    trap_poly = None
    for c in range(1, 256):
        hc = rep.h1.scale(c) + rep.h0
        for fp, _m in factor(hc).factors:
            if fp.deg == 2:
                trap_poly, trap_c = fp, c
                break
        if trap_poly is not None:
            break
    Q_y = trap_poly
    kq = q.bit_length() - 1
    for _ in range(10):
        F = Poly.random_monic(field, 1, rng)
        G = Poly.random_monic(field, 1, rng)
        d_F = 1
        h0p = [Poly.one(field), rep.h0]
        h1p = [Poly.one(field), rep.h1]
        Fq = F.frobenius_coeffs(kq)
        Gq = G.frobenius_coeffs(kq)
        Gt = Poly.zero(field)
        for j, gj in enumerate(G.coeffs()):
            if gj:
                Gt = Gt + (h0p[j] * h1p[1 - j]).scale(gj)
        Ft = Poly.zero(field)
        for i, fi in enumerate(F.coeffs()):
            if fi:
                Ft = Ft + (h0p[i] * h1p[1 - i]).scale(fi)
        N = Fq * Gt + Ft * Gq
        # h0 = c h1 mod Q makes F~ = h1 F(c), G~ = h1 G(c)
        collapsed = (rep.h1.scale(F.evaluate(trap_c)) * Gq
                     + Fq * rep.h1.scale(G.evaluate(trap_c)))
        assert (N % Q_y) == (collapsed % Q_y)


def test_descend_and_serialize(desk_rep, desk_pipeline, rng):
    rep = desk_rep
    lookup = desk_pipeline["lookup"]
    g = desk_pipeline["g"]
    target = rep.random_element(rng)
    tree = descend(rep, target, g, lookup, 3, seed=11)
    log_val = assemble_log(tree, rep, lookup)
    gbar = rep.pow(g, rep.c)
    assert rep.pow(target, rep.c) == rep.pow(gbar, log_val)
    # serialization reloads to the identical recombined log
    text = tree.to_file_text()
    back = DescentTree.from_file_text(rep, text)
    log2 = assemble_log(back, rep, lookup)
    assert log2 == log_val
    # monotonicity: non-recursive children have smaller degree
    def walk(node):
        for child, _e in node.children:
            assert child.degree <= node.degree or node.method in ("fly2",)
            walk(child)
    for node, _e in tree.root_children:
        walk(node)
