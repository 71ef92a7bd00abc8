"""Univariate polynomials over binary tower fields.

Poly wraps the packed representation from .packed: (field, packed int,
degree).  Values are immutable; the zero polynomial has degree -inf as
far as comparisons go (Poly.degree returns float("-inf")).

The factorization stack is the classical one: unit/content handling,
characteristic-p squarefree decomposition, distinct-degree splitting by
iterated Frobenius, and randomized equal-degree splitting via trace
maps (characteristic 2).  Randomized steps draw from an RNG seeded from
the run seed and the operand, so results are reproducible and
independent of call order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .fields import field_desc, _mix, _factorize_small
from .packed import packed_field, PackedModulus

RUN_SEED = 0  # module-level run seed; set_run_seed() adjusts reproducible randomness


def set_run_seed(seed: int):
    global RUN_SEED
    RUN_SEED = int(seed)


NEG_INF = float("-inf")


class Poly:
    __slots__ = ("field", "packed", "_deg")

    def __init__(self, field, packed, deg):
        self.field = field
        self.packed = packed
        self._deg = deg  # -1 encodes the zero polynomial internally

    # -- constructors ------------------------------------------------------------

    @staticmethod
    def from_coeffs(field, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            return Poly(field, 0, -1)
        pf = packed_field(field)
        return Poly(field, pf.pack(coeffs), len(coeffs) - 1)

    @staticmethod
    def zero(field):
        return Poly(field, 0, -1)

    @staticmethod
    def one(field):
        return Poly.constant(field, 1)

    @staticmethod
    def constant(field, c):
        if c == 0:
            return Poly.zero(field)
        pf = packed_field(field)
        return Poly(field, pf.spread(c), 0)

    @staticmethod
    def x(field):
        pf = packed_field(field)
        return Poly(field, pf.shift_x(pf.spread(1), 1), 1)

    @staticmethod
    def monomial(field, c, i):
        if c == 0:
            return Poly.zero(field)
        pf = packed_field(field)
        return Poly(field, pf.shift_x(pf.spread(c), i), i)

    @staticmethod
    def from_index(field, deg, idx):
        """The idx-th monic polynomial of the given degree (counting order)."""
        coeffs = []
        for _ in range(deg):
            coeffs.append(idx % field.order)
            idx //= field.order
        coeffs.append(1)
        return Poly.from_coeffs(field, coeffs)

    @staticmethod
    def random_monic(field, deg, rng):
        coeffs = [rng.randrange(field.order) for _ in range(deg)] + [1]
        return Poly.from_coeffs(field, coeffs)

    # -- basics ------------------------------------------------------------------

    @property
    def degree(self):
        return NEG_INF if self._deg < 0 else self._deg

    @property
    def deg(self):
        """Integer degree; -1 for the zero polynomial (internal convention)."""
        return self._deg

    @property
    def is_zero(self):
        return self._deg < 0

    @property
    def pf(self):
        return packed_field(self.field)

    def coeffs(self):
        return self.pf.unpack(self.packed, self._deg)

    def __getitem__(self, i):
        if i < 0 or i > self._deg:
            return 0
        return self.pf.x_coeff(self.packed, i)

    def lead(self):
        if self.is_zero:
            return 0
        return self.pf.x_coeff(self.packed, self._deg)

    @property
    def is_monic(self):
        return not self.is_zero and self.lead() == 1

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field is other.field
            and self.packed == other.packed
        )

    def __hash__(self):
        return hash((id(self.field), self.packed))

    def sort_key(self):
        return (self._deg, self.packed)

    def __repr__(self):
        if self.is_zero:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs()):
            if c:
                if i == 0:
                    terms.append(f"{c}")
                elif i == 1:
                    terms.append("X" if c == 1 else f"{c}*X")
                else:
                    terms.append(f"X^{i}" if c == 1 else f"{c}*X^{i}")
        return "Poly(" + " + ".join(reversed(terms)) + ")"

    # -- ring operations ------------------------------------------------------------

    def __add__(self, other):
        P = self.packed ^ other.packed
        d = self.pf.degree_of(P, max(self._deg, other._deg))
        return Poly(self.field, P, d)

    __sub__ = __add__  # characteristic 2

    def __mul__(self, other):
        if self.is_zero or other.is_zero:
            return Poly.zero(self.field)
        pf = self.pf
        P = pf.mul(self.packed, self._deg, other.packed, other._deg)
        return Poly(self.field, P, self._deg + other._deg)

    def scale(self, c):
        if c == 0 or self.is_zero:
            return Poly.zero(self.field)
        if c == 1:
            return self
        pf = self.pf
        return Poly(self.field, pf.mul_elem(self.packed, self._deg + 1, c), self._deg)

    def shift(self, k):
        """Multiply by X^k."""
        if self.is_zero:
            return self
        return Poly(self.field, self.pf.shift_x(self.packed, k), self._deg + k)

    def monic(self):
        if self.is_zero or self.lead() == 1:
            return self
        return self.scale(self.field.inv(self.lead()))

    def __divmod__(self, other):
        pf = self.pf
        Q, R, dr = pf.divmod(self.packed, self._deg, other.packed, other._deg)
        dq = self._deg - other._deg
        return (
            Poly(self.field, Q, pf.degree_of(Q, dq if dq >= 0 else -1)),
            Poly(self.field, R, dr),
        )

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def gcd(self, other):
        pf = self.pf
        G, dg = pf.gcd(self.packed, self._deg, other.packed, other._deg)
        return Poly(self.field, G, dg)

    def derivative(self):
        if self._deg < 1:
            return Poly.zero(self.field)
        # char 2: only odd-degree terms survive
        coeffs = self.coeffs()
        out = [coeffs[i] if i % 2 == 1 else 0 for i in range(1, self._deg + 1)]
        return Poly.from_coeffs(self.field, out)

    def evaluate(self, a):
        field = self.field
        acc = 0
        for c in reversed(self.coeffs()):
            acc = field.add(field.mul(acc, a), c)
        return acc

    def stretch(self, q):
        """Substitute X -> X^q (q >= 1)."""
        if self.is_zero:
            return self
        pf = self.pf
        P = 0
        for i, c in enumerate(self.coeffs()):
            if c:
                P |= pf.shift_x(pf.spread(c), i * q)
        return Poly(self.field, P, self._deg * q)

    def map_coeffs(self, fn):
        return Poly.from_coeffs(self.field, [fn(c) for c in self.coeffs()])

    def frobenius_coeffs(self, j=1):
        """Raise every coefficient to the p^j power."""
        field = self.field
        return self.map_coeffs(lambda c: field.frobenius(c, j))

    def lift_to(self, ext_field):
        """Reinterpret over an extension built on top of this field's tower."""
        if ext_field is self.field:
            return self
        if ext_field.levels[: len(self.field.levels)] != self.field.levels:
            raise ValueError("target field does not extend the coefficient tower")
        return Poly.from_coeffs(ext_field, self.coeffs())

    # -- modulus context ----------------------------------------------------------------

    def mod_context(self):
        return _mod_context(self.field, self.packed, self._deg)

    def pow_mod(self, e, modulus):
        ctx = modulus.mod_context()
        return Poly(self.field, ctx.pow(self.packed, e), -2)._fix_deg(modulus._deg - 1)

    def _fix_deg(self, upper):
        d = self.pf.degree_of(self.packed, upper)
        return Poly(self.field, self.packed, d)


_CTX_CACHE: dict = {}


def _mod_context(field, packed, deg) -> PackedModulus:
    key = (id(field), packed)
    ctx = _CTX_CACHE.get(key)
    if ctx is None:
        ctx = PackedModulus(packed_field(field), packed, deg)
        if len(_CTX_CACHE) > 4096:
            _CTX_CACHE.clear()
        _CTX_CACHE[key] = ctx
    return ctx


# -- text format -----------------------------------------------------------------------

def poly_to_text(f: Poly) -> str:
    """`level:c0,c1,...` with each ci the packed little-endian base-p element int."""
    if f.is_zero:
        return f"{len(f.field.levels)}:0"
    return f"{len(f.field.levels)}:" + ",".join(str(c) for c in f.coeffs())


def poly_from_text(field, text: str) -> Poly:
    level_s, _, body = text.strip().partition(":")
    if int(level_s) != len(field.levels):
        raise ValueError(
            f"polynomial text declares tower level {level_s}, field has {len(field.levels)}"
        )
    coeffs = [int(t) for t in body.split(",")] if body else [0]
    if any(c < 0 or c >= field.order for c in coeffs):
        raise ValueError("coefficient out of range for the declared field")
    return Poly.from_coeffs(field, coeffs)


# -- factorization ------------------------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    """unit * prod(factor^mult); factors monic irreducible, sorted."""

    unit: int
    factors: tuple

    def expand(self, field):
        out = Poly.constant(field, self.unit)
        for f, m in self.factors:
            for _ in range(m):
                out = out * f
        return out

    def degrees(self):
        return sorted(f.deg for f, m in self.factors for _ in range(m))

    def max_degree(self):
        return max((f.deg for f, _ in self.factors), default=0)

    def is_smooth(self, m):
        return all(f.deg <= m for f, _ in self.factors)


def _rng_for(tag, f: Poly):
    return random.Random(_mix(RUN_SEED, tag, id(f.field), f.packed))


def sqrt_poly(f: Poly) -> Poly:
    """Inverse of x -> x^2 on polynomials that are squares (char 2)."""
    field = f.field
    coeffs = f.coeffs()
    if any(coeffs[i] for i in range(1, len(coeffs), 2)):
        raise ValueError("polynomial is not a square")
    half = [field.frobenius(c, field.degree - 1) for c in coeffs[0::2]]
    return Poly.from_coeffs(field, half)


def squarefree_decomposition(f: Poly):
    """[(g_i, m_i)] with f monic = prod g_i^m_i, g_i squarefree pairwise coprime."""
    if f.deg <= 0:
        return []
    out = []
    fp = f.derivative()
    if fp.is_zero:
        g = sqrt_poly(f)
        for h, m in squarefree_decomposition(g):
            out.append((h, 2 * m))
        return out
    c = f.gcd(fp)
    w = f // c
    i = 1
    while w.deg > 0:
        y = w.gcd(c)
        z = w // y
        if z.deg > 0:
            out.append((z, i))
        w = y
        c = c // y
        i += 1
    if c.deg > 0:
        for h, m in squarefree_decomposition(sqrt_poly(c)):
            out.append((h, 2 * m))
    return out


def distinct_degree_split(f: Poly, max_degree=None, block=8):
    """Distinct-degree factorization of a monic squarefree f, f(0) != 0.

    Returns (parts, remainder): parts is [(product, d)] for d up to
    max_degree (or deg f), remainder collects everything of larger degree
    (the monic 1 when max_degree is None).  Frobenius powers accumulate in
    blocks, with one gcd per block and a refinement pass on hits.
    """
    field = f.field
    q = field.order
    ctx = f.mod_context()
    out = []
    rem = f
    x_m = ctx.x_m
    h = x_m
    d = 0
    limit = f.deg if max_degree is None else min(max_degree, f.deg)
    while rem.deg > 0 and d < limit:
        if 2 * (d + 1) > rem.deg:
            if max_degree is None or rem.deg <= max_degree:
                out.append((rem, rem.deg))
                rem = Poly.one(field)
            break
        # accumulate a block of (X^(q^i) - X) terms before taking a gcd
        terms = []
        acc = None
        while len(terms) < block and d < limit and 2 * (d + 1) <= rem.deg:
            d += 1
            h = ctx.pow_x_q(h, q)
            terms.append((d, h))
            t = h ^ x_m
            if acc is None:
                acc = t
            elif acc and t:
                acc = ctx.mulmod(acc, t)
            else:
                acc = 0
        if acc is None:
            break
        gb = rem.gcd(Poly(field, acc, -2)._fix_deg(f.deg - 1))
        if gb.deg > 0:
            if len(terms) == 1:
                out.append((gb, terms[0][0]))
                rem = rem // gb
            else:
                for di, hi in terms:
                    g = gb.gcd(Poly(field, hi ^ x_m, -2)._fix_deg(f.deg - 1))
                    if g.deg > 0:
                        out.append((g, di))
                        gb = gb // g
                        rem = rem // g
                    if gb.deg == 0:
                        break
    return out, rem


def equal_degree_split(f: Poly, d: int, rng=None):
    """Split a monic product of degree-d irreducibles into the irreducibles."""
    field = f.field
    if f.deg == d:
        return [f]
    if rng is None:
        rng = _rng_for("edf", f)
    m_total = field.degree * d  # F_2 degree of each residue component
    ctx = f.mod_context()
    stack = [f]
    out = []
    while stack:
        g = stack.pop()
        if g.deg == d:
            out.append(g)
            continue
        while True:
            u = Poly.from_coeffs(field, [rng.randrange(field.order) for _ in range(g.deg)])
            if u.is_zero:
                continue
            # absolute trace to F_2 of u, computed mod f then reduced to g
            t = ctx.to_mont(u.packed)
            acc = t
            for _ in range(m_total - 1):
                t = ctx.sqrmod(t)
                acc ^= t
            tp = Poly(field, ctx.from_mont(acc), -2)._fix_deg(f.deg - 1)
            h = g.gcd(tp)
            if 0 < h.deg < g.deg:
                stack.append(h)
                stack.append(g // h)
                break
    return out


def factor(f: Poly) -> Factorization:
    """Complete factorization into monic irreducibles with unit."""
    if f.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    field = f.field
    unit = f.lead()
    g = f.monic()
    factors = []
    if g.deg == 0:
        return Factorization(unit, ())
    # strip X powers so every modulus has invertible constant term
    e = 0
    while g[0] == 0 and g.deg > 0:
        g = g // Poly.x(field)
        e += 1
    if e:
        factors.append((Poly.x(field), e))
    if g.deg > 0:
        for sq, mult in squarefree_decomposition(g):
            parts, rem = distinct_degree_split(sq)
            assert rem.deg <= 0
            for prod, d in parts:
                for irr in equal_degree_split(prod, d):
                    factors.append((irr, mult))
    factors.sort(key=lambda fm: fm[0].sort_key())
    return Factorization(unit, tuple(factors))


def is_smooth_exact(f: Poly, m: int) -> bool:
    """Ground-truth m-smoothness via squarefree + distinct-degree splitting."""
    if f.is_zero:
        raise ValueError("smoothness of the zero polynomial is undefined")
    if f.deg <= m:
        return True
    g = f.monic()
    while g[0] == 0 and g.deg > 0:
        g = g // Poly.x(f.field)
    if g.deg <= m:
        return True
    for sq, _ in squarefree_decomposition(g):
        if sq.deg > m:
            _, rem = distinct_degree_split(sq, max_degree=m)
            if rem.deg > 0:
                return False
    return True


def smooth_factor(f: Poly, m: int):
    """factor() specialized to an m-smooth input; None if not m-smooth."""
    if f.is_zero:
        raise ValueError("cannot factor the zero polynomial")
    field = f.field
    unit = f.lead()
    g = f.monic()
    factors = []
    e = 0
    while g[0] == 0 and g.deg > 0:
        g = g // Poly.x(field)
        e += 1
    if e:
        factors.append((Poly.x(field), e))
    for sq, mult in squarefree_decomposition(g):
        if sq.deg == 0:
            continue
        parts, rem = distinct_degree_split(sq, max_degree=m)
        if rem.deg > 0:
            return None
        for prod, d in parts:
            for irr in equal_degree_split(prod, d):
                factors.append((irr, mult))
    factors.sort(key=lambda fm: fm[0].sort_key())
    return Factorization(unit, tuple(factors))


def is_irreducible(f: Poly) -> bool:
    """Rabin test over the coefficient field."""
    if f.deg < 1:
        return False
    if f.deg == 1:
        return True
    if f[0] == 0:
        return False  # divisible by X
    f = f.monic()
    field = f.field
    q = field.order
    n = f.deg
    ctx = f.mod_context()
    checkpoints = {n // l for l in _factorize_small(n)}
    h = ctx.x_m
    for i in range(1, n + 1):
        h = ctx.pow_x_q(h, q)
        if i in checkpoints:
            diff = Poly(field, ctx.from_mont(h ^ ctx.x_m), -2)._fix_deg(n - 1)
            if f.gcd(diff).deg != 0:
                return False
    return h == ctx.x_m


def splits_completely(f: Poly) -> bool:
    """True iff f has deg(f) distinct roots in its coefficient field."""
    if f.deg < 1:
        return False
    if f.deg == 1:
        return True
    field = f.field
    if f.deg > field.order:
        return False  # more roots than field elements
    g = f.monic()
    if g[0] == 0:
        g = g // Poly.x(field)
        if g[0] == 0:
            return False  # X^2 divides f
    if g.deg <= 1:
        return True
    ctx = g.mod_context()
    h = ctx.pow_x_q(ctx.x_m, field.order)
    return h == ctx.x_m


def splits_into_linears(f: Poly):
    """Roots with multiplicity if f is a product of linear factors, else None."""
    if f.deg < 0:
        raise ValueError("zero polynomial")
    if f.deg == 0:
        return []
    out = []
    for g, m in squarefree_decomposition(f.monic()):
        if g.deg > 0 and not splits_completely(g):
            return None
        for r in distinct_roots(g):
            out.append((r, m))
    out.sort()
    return out


def distinct_roots(f: Poly):
    """All roots of a squarefree fully-split monic f (trace splitting)."""
    field = f.field
    f = f.monic()
    if f.deg <= 0:
        return []
    if f.deg == 1:
        return [f[0]]
    if field.order <= 64:
        return sorted(a for a in field.elements() if f.evaluate(a) == 0)
    pre = []
    if f[0] == 0:
        pre.append(0)
        f = f // Poly.x(field)
        if f.deg == 1:
            return sorted(pre + [f[0]])
    rng = _rng_for("roots", f)
    ctx = f.mod_context()
    stack = [f]
    roots = []
    while stack:
        g = stack.pop()
        if g.deg == 1:
            roots.append(g[0])
            continue
        while True:
            u = field.random_element(rng, nonzero=True)
            # trace of u*X mod f
            t = ctx.to_mont(ctx.pf.shift_x(ctx.pf.spread(u), 1))
            acc = t
            for _ in range(field.degree - 1):
                t = ctx.sqrmod(t)
                acc ^= t
            tp = Poly(field, ctx.from_mont(acc), -2)._fix_deg(f.deg - 1)
            h = g.gcd(tp)
            if 0 < h.deg < g.deg:
                stack.append(h)
                stack.append(g // h)
                break
    return sorted(roots + pre)


# -- irreducible generation ----------------------------------------------------------------


def monic_polys(field, deg):
    for idx in range(field.order**deg):
        yield Poly.from_index(field, deg, idx)


@lru_cache(maxsize=64)
def _irreducibles_cached(field_key, deg):
    field = field_desc(*field_key)
    return tuple(f for f in monic_polys(field, deg) if is_irreducible(f))


def irreducibles(field, deg):
    """All monic irreducibles of the given degree (cached; small fields only)."""
    if field.order**deg > 1 << 22:
        raise ValueError("irreducible enumeration too large; sample instead")
    return _irreducibles_cached((field.p, field.levels), deg)


def random_irreducible(field, deg, rng):
    while True:
        f = Poly.random_monic(field, deg, rng)
        if is_irreducible(f):
            return f


def split_over_extension(f: Poly, ext_field=None):
    """Split an even-degree irreducible into conjugate halves one level up.

    Returns (g, g_conj) of degree deg(f)/2 over the quadratic extension,
    with g * g_conj = f and g_conj the coefficientwise Frobenius image of
    g under a -> a^(q^k) (q^k the order of f's coefficient field).
    """
    field = f.field
    if f.deg % 2 or f.deg < 2:
        raise ValueError("split_over_extension needs an irreducible of even degree")
    if not is_irreducible(f):
        raise ValueError("polynomial is reducible; split is for irreducibles")
    if ext_field is None:
        ext_field = quadratic_extension(field)
    lifted = f.lift_to(ext_field).monic()
    d = f.deg // 2
    parts = []
    dd_parts, dd_rem = distinct_degree_split(lifted)
    assert dd_rem.deg <= 0
    for prod, dd in dd_parts:
        if dd != d:
            raise AssertionError("unexpected factor degree in conjugate split")
        parts.extend(equal_degree_split(prod, d) if prod.deg > d else [prod])
    parts.sort(key=lambda g: g.sort_key())
    g = parts[0]
    g_conj = g.map_coeffs(lambda c: ext_field.pow(c, field.order))
    if g * g_conj != lifted:
        raise AssertionError("conjugate split failed to multiply back")
    unit = f.lead()
    if unit != 1:
        g = g.scale(unit)  # keep g * g_conj == f exactly for non-monic f
    return g, g_conj


@lru_cache(maxsize=64)
def _quad_ext_cached(field_key):
    field = field_desc(*field_key)
    # X^2 + X + c is irreducible over F_{2^m} iff Tr(c) = 1
    for c in field.elements():
        if field.trace_to_prime(c) == 1:
            return field.extension((c, 1, 1))
    raise AssertionError("no trace-one element found")


def quadratic_extension(field):
    return _quad_ext_cached((field.p, field.levels))
