from dlplab.algebra import Poly, factor, irreducible_count, smooth_count, smooth_probability
from dlplab.algebra.density import splits_completely_probability
from dlplab.algebra.fields import F2


def test_irreducible_counts_f2():
    # classical table for F_2
    assert [irreducible_count(2, d) for d in range(1, 9)] == [2, 1, 2, 3, 6, 9, 18, 30]


def test_irreducible_counts_sum():
    # sum over d | n of d * N_q(d) = q^n
    for q in (2, 4, 16):
        for n in (1, 2, 3, 4, 6):
            total = sum(d * irreducible_count(q, d) for d in range(1, n + 1) if n % d == 0)
            assert total == q**n


def test_smooth_count_exhaustive_f2():
    # brute-force every monic degree-n polynomial over F_2
    from dlplab.algebra import monic_polys

    for n in (3, 5, 7):
        for m in (1, 2, 3):
            brute = 0
            for f in monic_polys(F2, n):
                brute += factor(f).is_smooth(m)
            assert brute == smooth_count(2, n, m), (n, m)


def test_smooth_probability_monotone():
    for q in (4, 16):
        ps = [smooth_probability(q, 25, m) for m in (2, 4, 8, 12, 25)]
        assert all(a <= b + 1e-15 for a, b in zip(ps, ps[1:]))
        assert ps[-1] == 1.0


def test_split_probability_near_factorial():
    # fully-linear probability approaches 1/n! for big fields
    p = splits_completely_probability(4096, 4)
    assert abs(p - 1 / 24) / (1 / 24) < 0.05
