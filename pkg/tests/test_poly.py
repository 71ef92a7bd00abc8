import random

import pytest

from dlplab.algebra import (
    Poly,
    factor,
    smooth_factor,
    is_smooth_exact,
    is_irreducible,
    splits_completely,
    splits_into_linears,
    distinct_roots,
    split_over_extension,
    quadratic_extension,
    irreducibles,
    monic_polys,
    field_create,
    irreducible_count,
    squarefree_decomposition,
)
from dlplab.algebra.fields import F2


def _ref_mul(field, fc, gc):
    out = [0] * (len(fc) + len(gc) - 1)
    for i, a in enumerate(fc):
        if a:
            for j, b in enumerate(gc):
                if b:
                    out[i + j] = field.add(out[i + j], field.mul(a, b))
    return out


def test_packed_mul_against_schoolbook(f16, f4096, rng):
    for field in (F2, f16, f4096):
        for _ in range(60):
            f = Poly.random_monic(field, rng.randrange(1, 15), rng)
            g = Poly.random_monic(field, rng.randrange(1, 12), rng)
            want = _ref_mul(field, f.coeffs(), g.coeffs())
            assert (f * g).coeffs() == want


def test_divmod_roundtrip(f16, rng):
    for _ in range(80):
        f = Poly.random_monic(f16, rng.randrange(1, 20), rng)
        g = Poly.random_monic(f16, rng.randrange(1, 12), rng).scale(rng.randrange(1, 16))
        q, r = divmod(f, g)
        assert q * g + r == f
        assert r.degree < g.degree


def test_zero_polynomial_degree_sentinel(f16):
    z = Poly.zero(f16)
    assert z.degree == float("-inf")
    assert z.degree < 0
    assert z.degree < Poly.one(f16).degree


def test_factor_x2_plus_x_over_f2():
    f = Poly.from_coeffs(F2, [0, 1, 1])
    fac = factor(f)
    assert [(g.coeffs(), m) for g, m in fac.factors] == [([0, 1], 1), ([1, 1], 1)]


def test_factor_x4_plus_x_two_views(f4):
    # over F_2: X(X+1)(X^2+X+1); over F_4: product of all monic linears
    f2_version = factor(Poly.from_coeffs(F2, [0, 1, 0, 0, 1]))
    assert f2_version.degrees() == [1, 1, 2]
    f4_version = factor(Poly.from_coeffs(f4, [0, 1, 0, 0, 1]))
    assert f4_version.degrees() == [1, 1, 1, 1]
    prod = Poly.one(f4)
    for a in range(4):
        prod = prod * Poly.from_coeffs(f4, [a, 1])
    assert prod == Poly.from_coeffs(f4, [0, 1, 0, 0, 1])


def test_factor_multiply_back(f16, f64, rng):
    for field in (F2, f16, f64):
        for _ in range(150):
            deg = rng.randrange(1, 14)
            f = Poly.random_monic(field, deg, rng)
            if rng.random() < 0.3:
                f = f.scale(field.random_element(rng, nonzero=True))
            fac = factor(f)
            assert fac.expand(field) == f
            for g, _m in fac.factors:
                assert is_irreducible(g)


def test_squarefree_decomposition_powers(f16, rng):
    for _ in range(30):
        base = Poly.random_monic(f16, rng.randrange(1, 4), rng)
        e = rng.randrange(1, 5)
        f = Poly.one(f16)
        for _ in range(e):
            f = f * base
        parts = squarefree_decomposition(f)
        prod = Poly.one(f16)
        for g, m in parts:
            for _ in range(m):
                prod = prod * g
        assert prod == f


def test_is_irreducible_brute(f4):
    # degree-2 over F_4: exactly irreducible_count(4, 2) = 6 irreducibles
    got = [f for f in monic_polys(f4, 2) if is_irreducible(f)]
    assert len(got) == irreducible_count(4, 2) == 6
    for f in got:
        assert all(f.evaluate(a) != 0 for a in f4.elements())


def test_is_irreducible_examples():
    assert is_irreducible(Poly.from_coeffs(F2, [1, 1, 1]))       # X^2+X+1
    assert not is_irreducible(Poly.from_coeffs(F2, [1, 0, 1]))   # (X+1)^2


def test_splits_completely_distinct_convention(f16):
    # (X+1)(X+2)(X+3): distinct -> splits
    f = Poly.from_coeffs(f16, [1, 1]) * Poly.from_coeffs(f16, [2, 1]) * Poly.from_coeffs(f16, [3, 1])
    assert splits_completely(f)
    # (X+1)^2 (X+2): repeated root -> not "split" under the distinct convention
    g = Poly.from_coeffs(f16, [1, 1]) * Poly.from_coeffs(f16, [1, 1]) * Poly.from_coeffs(f16, [2, 1])
    assert not splits_completely(g)
    assert splits_into_linears(g) == [(1, 2), (2, 1)]
    # an irreducible quadratic does not split
    assert not splits_completely(Poly.from_coeffs(F2, [1, 1, 1]))


def test_distinct_roots(f16, rng):
    for _ in range(40):
        roots = rng.sample(range(16), rng.randrange(1, 6))
        f = Poly.one(f16)
        for r_ in roots:
            f = f * Poly.from_coeffs(f16, [r_, 1])
        assert distinct_roots(f) == sorted(roots)


def test_split_over_extension_f2_example():
    f = Poly.from_coeffs(F2, [1, 1, 1])
    g, gc = split_over_extension(f)
    F4x = g.field
    assert g.deg == gc.deg == 1
    assert g * gc == f.lift_to(F4x)
    # the two roots are w and w^2 = w + 1 for a generator w of F_4*
    roots = sorted([g[0], gc[0]])
    assert roots == [2, 3]


def test_split_over_extension_degree6_over_f4(f4, rng):
    f = next(h for h in monic_polys(f4, 6) if is_irreducible(h))
    g, gc = split_over_extension(f)
    assert g.deg == 3 and gc.deg == 3
    assert g * gc == f.lift_to(g.field)
    assert g.field.order == 16  # the quadratic extension of F_4 is F_16
    # conjugate relation
    assert gc == g.map_coeffs(lambda c: g.field.pow(c, 4))


def test_split_over_extension_degree8_over_f4096(f4096, rng):
    from dlplab.algebra import random_irreducible

    f = random_irreducible(f4096, 8, rng)
    g, gc = split_over_extension(f)
    assert g.deg == gc.deg == 4
    assert g * gc == f.lift_to(g.field)
    # double split: four degree-2 conjugates over the second extension
    g2a, g2b = split_over_extension(g)
    assert g2a.deg == 2
    assert g2a * g2b == g.lift_to(g2a.field)


def test_split_over_extension_rejects_odd(f16, rng):
    from dlplab.algebra import random_irreducible

    f = random_irreducible(f16, 3, rng)
    with pytest.raises(ValueError):
        split_over_extension(f)


def test_smooth_factor_and_exact(f16, rng):
    for _ in range(150):
        f = Poly.random_monic(f16, rng.randrange(2, 18), rng)
        m = rng.choice([2, 3, 4, 6])
        truth = factor(f).is_smooth(m)
        assert is_smooth_exact(f, m) == truth
        sf = smooth_factor(f, m)
        assert (sf is not None) == truth
        if sf:
            assert sf.expand(f16) == f
