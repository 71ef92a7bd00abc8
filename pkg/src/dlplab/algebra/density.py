"""Counting irreducibles and smooth polynomials over F_q.

smooth_count is an exact integer dynamic program over the multiset
generating function prod_{d<=m} (1-x^d)^(-I_d); probabilities come out
as exact ratios converted to float at the end.  These tables drive
search budgeting and the statistical acceptance bands.
"""

from functools import lru_cache
from fractions import Fraction
from math import comb


@lru_cache(maxsize=None)
def _mobius(n):
    if n == 1:
        return 1
    m, p, cnt = n, 2, 0
    res = 1
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    if m > 1:
        res = -res
    return res


@lru_cache(maxsize=None)
def irreducible_count(q, d):
    """Number of monic irreducible polynomials of degree d over F_q."""
    total = sum(_mobius(e) * q ** (d // e) for e in range(1, d + 1) if d % e == 0)
    return total // d


@lru_cache(maxsize=None)
def _smooth_table(q, m, nmax):
    g = [0] * (nmax + 1)
    g[0] = 1
    for d in range(1, min(m, nmax) + 1):
        idr = irreducible_count(q, d)
        new = [0] * (nmax + 1)
        for t in range(nmax + 1):
            acc = 0
            j = 0
            while j * d <= t:
                acc += comb(idr + j - 1, j) * g[t - j * d]
                j += 1
            new[t] = acc
        g = new
    return tuple(g)


def smooth_count(q, n, m):
    """Exact number of m-smooth monic degree-n polynomials over F_q."""
    if n < 0:
        return 0
    return _smooth_table(q, m, n)[n]


def smooth_probability(q, n, m):
    """Probability that a uniform monic degree-n polynomial is m-smooth."""
    if n <= m:
        return 1.0
    return float(Fraction(smooth_count(q, n, m), q**n))


def splits_completely_probability(q_k, n):
    """Probability a uniform monic degree-n polynomial over F_{q_k} splits
    into linear factors (multiplicity allowed)."""
    return smooth_probability(q_k, n, 1)
