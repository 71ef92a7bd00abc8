"""Exact arithmetic for towers of binary finite fields.

A field is described by its characteristic p together with a chain of
extensions, each given by a monic defining polynomial over the level
below.  Elements are plain Python ints: the base-p digits of the int,
read in mixed radix along the tower, are the element's coordinates in
the tower basis (little-endian).  For p = 2 this means an element of an
extension of total degree d over F_2 is a d-bit integer, addition is
XOR, and 0 and 1 are literally the zero and one of the field.

Only p = 2 towers are supported beyond the prime field; the formulas
elsewhere in the package are written for general p but every tested
instance is binary.

Small fields (up to TABLE_BITS bits) get exp/log tables built lazily,
after which mul/inv/pow are O(1) lookups.
"""

from __future__ import annotations

import random
from functools import lru_cache

TABLE_BITS = 16  # build exp/log tables for fields with at most 2^16 elements

_REGISTRY: dict = {}


def _mix(*parts) -> int:
    """Stable small hash used to derive per-call RNG seeds."""
    h = 0x9E3779B97F4A7C15
    for part in parts:
        for b in str(part).encode():
            h = ((h ^ b) * 0x100000001B3) & ((1 << 64) - 1)
    return h


class FieldDesc:
    """A tower of binary field extensions with int-packed elements.

    levels is a tuple of (degree, coeffs) pairs; coeffs is the monic
    defining polynomial of that level, little-endian, each coefficient
    an element (int) of the level below.
    """

    def __init__(self, p, levels=(), check=True):
        levels = tuple((int(d), tuple(int(c) for c in coeffs)) for d, coeffs in levels)
        self.p = int(p)
        self.levels = levels
        if check:
            if self.p < 2:
                raise ValueError("characteristic must be a prime >= 2")
            if self.p != 2 and levels and any(d > 1 for d, _ in levels):
                raise NotImplementedError("extension towers are implemented for p = 2 only")
        deg = 1
        self._level_degrees = []
        for d, coeffs in levels:
            if len(coeffs) != d + 1:
                raise ValueError("defining polynomial length must be degree + 1")
            if coeffs[-1] != 1:
                raise ValueError("defining polynomial must be monic")
            deg *= d
            self._level_degrees.append(d)
        self.degree = deg  # total degree over F_p
        self.order = self.p ** deg
        self.bits = deg if self.p == 2 else None
        self.base = None
        if levels:
            self.base = field_desc(self.p, levels[:-1])
        # per-level bit strides for digit extraction (p = 2)
        self._strides = []
        s = 1
        for d in self._level_degrees:
            self._strides.append(s)
            s *= d
        self._exp = None
        self._log = None
        self._gen = None
        self._tables_checked = False

    # -- construction helpers -------------------------------------------------

    def __repr__(self):
        return f"F({self.p}^{self.degree})"

    def __reduce__(self):
        return (field_desc, (self.p, self.levels))

    @property
    def is_prime_field(self):
        return not self.levels or self.degree == 1

    def extension(self, coeffs):
        """The field one level up, defined by monic coeffs over self."""
        coeffs = tuple(int(c) for c in coeffs)
        return field_desc(self.p, self.levels + ((len(coeffs) - 1, coeffs),))

    # -- digit <-> int packing ------------------------------------------------

    def digits(self, a):
        """Top-level coordinates of a over the level below."""
        if not self.levels:
            return (a,)
        d = self._level_degrees[-1]
        bits = self.base.degree
        mask = (1 << bits) - 1
        return tuple((a >> (i * bits)) & mask for i in range(d))

    def from_digits(self, digs):
        if not self.levels:
            return digs[0]
        bits = self.base.degree
        a = 0
        for i, c in enumerate(digs):
            a |= c << (i * bits)
        return a

    # -- arithmetic ------------------------------------------------------------

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        return (a + b) % self.p

    sub = add  # characteristic 2

    def neg(self, a):
        if self.p == 2:
            return a
        return (-a) % self.p

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        if a == 1:
            return b
        if b == 1:
            return a
        if self._exp is None:
            if not self._tables_checked:
                self.ensure_tables()
                if self._exp is not None:
                    return self._exp[self._log[a] + self._log[b]]
            return self._mul_generic(a, b)
        return self._exp[self._log[a] + self._log[b]]

    def _mul_generic(self, a, b):
        if self.is_prime_field:
            return (a * b) % self.p
        base = self.base
        da = self.digits(a)
        db = self.digits(b)
        d = self._level_degrees[-1]
        # schoolbook product over the sublevel
        prod = [0] * (2 * d - 1)
        for i, ai in enumerate(da):
            if ai == 0:
                continue
            for j, bj in enumerate(db):
                if bj:
                    prod[i + j] = base.add(prod[i + j], base.mul(ai, bj))
        # reduce by the monic defining polynomial
        coeffs = self.levels[-1][1]
        for i in range(2 * d - 2, d - 1, -1):
            c = prod[i]
            if c == 0:
                continue
            prod[i] = 0
            for e in range(d):
                ce = coeffs[e]
                if ce:
                    prod[i - d + e] = base.add(prod[i - d + e], base.mul(c, ce))
        return self.from_digits(prod[:d])

    def sqr(self, a):
        return self.mul(a, a)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("field inverse of zero")
        if a == 1:
            return 1
        if self._exp is None and not self._tables_checked:
            self.ensure_tables()
        if self._exp is not None:
            return self._exp[self.order - 1 - self._log[a]]
        return self.pow(a, self.order - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n):
        n = int(n)
        if n < 0:
            a = self.inv(a)
            n = -n
        n_red = n % (self.order - 1) if a != 0 and self.order > 2 else n
        if a == 0:
            return 0 if n else 1
        if self._log is None and not self._tables_checked:
            self.ensure_tables()
        if self._log is not None:
            return self._exp[(self._log[a] * n_red) % (self.order - 1)]
        r = 1
        while n_red:
            if n_red & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            n_red >>= 1
        return r

    def frobenius(self, a, j=1):
        """a^(p^j); j may be any integer (reduced mod the tower degree)."""
        j %= self.degree
        r = a
        for _ in range(j):
            r = self.pow(r, self.p)
        return r

    # -- tables ------------------------------------------------------------------

    def ensure_tables(self):
        self._tables_checked = True
        if self._exp is not None or self.order > (1 << TABLE_BITS) or self.is_prime_field:
            return
        g = self._find_generator()
        n = self.order - 1
        exp = [1] * (2 * n)
        log = [0] * self.order
        v = 1
        for i in range(n):
            exp[i] = v
            log[v] = i
            v = self._mul_generic(v, g) if not self.is_prime_field else (v * g) % self.p
        if v != 1:
            raise AssertionError("generator order mismatch while building tables")
        for i in range(n, 2 * n):
            exp[i] = exp[i - n]
        self._exp = exp
        self._log = log
        self._gen = g

    def _find_generator(self):
        n = self.order - 1
        fac = _factorize_small(n)
        for g in range(2, self.order):
            if all(self._pow_generic(g, n // q) != 1 for q in fac):
                return g
        raise AssertionError("no multiplicative generator found")

    def _pow_generic(self, a, n):
        r = 1
        while n:
            if n & 1:
                r = self._mul_generic(r, a)
            a = self._mul_generic(a, a)
            n >>= 1
        return r

    def generator(self):
        """A fixed multiplicative generator of the unit group."""
        if self._gen is None:
            if self.order <= (1 << TABLE_BITS):
                self.ensure_tables()
            if self._gen is None:
                n = self.order - 1
                fac = _factorize_small(n)
                for g in range(2, self.order):
                    if all(self.pow(g, n // q) != 1 for q in fac):
                        self._gen = g
                        break
        return self._gen

    # -- subfields -----------------------------------------------------------------

    def in_subfield(self, a, sub_order):
        """True iff a lies in the subfield with sub_order elements."""
        return self.pow(a, sub_order) == a

    def subfield_elements(self, sub_order):
        """All elements of the subfield of the given order, sorted."""
        d = _int_log(sub_order, self.p)
        if self.degree % d:
            raise ValueError(f"no subfield of order {sub_order} in {self}")
        return _subfield_elements_cached(self, sub_order)

    def coeff_subfield_degree(self, a):
        """Degree over F_p of the subfield generated by a."""
        for d in sorted(_divisors(self.degree)):
            if self.frobenius(a, d) == a:
                return d
        return self.degree

    def root_q(self, a, q):
        """The unique q-th root of a (q a power of p dividing the field order)."""
        lq = _int_log(q, self.p)
        return self.frobenius(a, self.degree - (lq % self.degree))

    def trace_to_prime(self, a):
        t = 0
        x = a
        for _ in range(self.degree):
            t = self.add(t, x)
            x = self.pow(x, self.p)
        return t

    def random_element(self, rng, nonzero=False):
        while True:
            a = rng.randrange(self.order)
            if a or not nonzero:
                return a

    def elements(self):
        return range(self.order)


def field_desc(p, levels=()):
    """Interned FieldDesc factory (identical towers share one instance)."""
    key = (int(p), tuple((int(d), tuple(int(c) for c in coeffs)) for d, coeffs in levels))
    fd = _REGISTRY.get(key)
    if fd is None:
        fd = FieldDesc(p, key[1])
        _REGISTRY[key] = fd
    return fd


def _subfield_elements_cached(field, sub_order):
    cache = getattr(field, "_subfield_cache", None)
    if cache is None:
        cache = field._subfield_cache = {}
    if sub_order not in cache:
        if field.order <= (1 << TABLE_BITS):
            field.ensure_tables()
        if field._exp is not None and (field.order - 1) % (sub_order - 1) == 0:
            step = (field.order - 1) // (sub_order - 1)
            els = sorted({0, 1} | {field._exp[i * step] for i in range(sub_order - 1)})
        else:
            els = sorted(a for a in field.elements() if field.in_subfield(a, sub_order))
        if len(els) != sub_order:
            raise AssertionError("subfield enumeration size mismatch")
        cache[sub_order] = tuple(els)
    return cache[sub_order]


def _int_log(n, p):
    l = 0
    m = 1
    while m < n:
        m *= p
        l += 1
    if m != n:
        raise ValueError(f"{n} is not a power of {p}")
    return l


@lru_cache(maxsize=None)
def _divisors(n):
    divs = [d for d in range(1, n + 1) if n % d == 0]
    return tuple(divs)


@lru_cache(maxsize=None)
def _factorize_small(n):
    """Prime factors of n (trial division; n stays small here)."""
    fac = []
    d = 2
    m = n
    while d * d <= m:
        if m % d == 0:
            fac.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        fac.append(m)
    return tuple(fac)


# Frequently used concrete towers.

F2 = field_desc(2)


def gf(p, *defining):
    """Convenience tower builder: gf(2, [coeffs of level 1], [level 2], ...)."""
    f = field_desc(p)
    for coeffs in defining:
        f = f.extension(coeffs)
    return f
