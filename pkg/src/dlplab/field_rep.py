"""Field representations of F_{q^kn} via a degree-n factor of h1(X^q)X - h0(X^q).

A representation is a triple (h0, h1, I) over F_{q^k} with
max(deg h0, deg h1) = d_h and I an irreducible degree-n factor of
T = h1(X^q)X - h0(X^q), so that K = F_{q^k}[X]/(I).  Writing x for the
class of X and y = x^q, the two views K = F_{q^k}(x) = F_{q^k}(y) are
exchanged by y -> x^q and x -> h0(y)/h1(y).

The subgroup order r (a prime divisor of q^kn - 1) and its cofactor c
ride along; logarithms everywhere in the package are taken mod r in the
order-r subgroup reached by raising to c.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .algebra import Poly, factor, is_irreducible, poly_to_text, poly_from_text
from .algebra.fields import field_desc, _mix
from .algebra.packed import packed_field, PackedModulus


@dataclass
class FieldRep:
    field: object          # FieldDesc of F_{q^k}
    q: int                 # size of the designated base field F_q
    k: int
    n: int
    d_h: int
    h0: Poly
    h1: Poly
    I: Poly
    r: int = 0             # prime subgroup order (0 = not yet assigned)
    c: int = 0             # cofactor (q^kn - 1) // r

    def __post_init__(self):
        self.order = self.field.order**self.n  # |K^x| + 1
        self._ctx = None
        self._y_pows = None

    @property
    def ctx(self) -> PackedModulus:
        if self._ctx is None:
            self._ctx = PackedModulus(packed_field(self.field), self.I.packed, self.n)
        return self._ctx

    # -- elements of K are Polys of degree < n over self.field -------------------

    def reduce(self, f: Poly) -> Poly:
        if f.deg < self.n:
            return f
        return f % self.I

    def mul(self, a: Poly, b: Poly) -> Poly:
        return self.reduce(a * b)

    def pow(self, a: Poly, e: int) -> Poly:
        e %= self.order - 1
        if a.is_zero:
            return a if e else Poly.one(self.field)
        ctx = self.ctx
        return Poly(self.field, ctx.pow(a.packed, e), -2)._fix_deg(self.n - 1)

    def inv_elem(self, a: Poly) -> Poly:
        return self.pow(a, self.order - 2)

    def is_one(self, a: Poly) -> bool:
        return a.deg == 0 and a[0] == 1

    def x(self) -> Poly:
        return Poly.x(self.field)

    def random_element(self, rng) -> Poly:
        while True:
            f = Poly.from_coeffs(self.field, [rng.randrange(self.field.order) for _ in range(self.n)])
            if not f.is_zero:
                return f

    # -- the two isomorphic views -----------------------------------------------

    def xq(self) -> Poly:
        """y = x^q as an element (reduced mod I)."""
        return self.pow(self.x(), self.q)

    def _y_powers(self, upto):
        if self._y_pows is None or len(self._y_pows) <= upto:
            y = self.xq()
            pows = [Poly.one(self.field), y]
            while len(pows) <= upto:
                pows.append(self.mul(pows[-1], y))
            self._y_pows = pows
        return self._y_pows

    def to_x(self, e_y: Poly) -> Poly:
        """Interpret a polynomial in y as an element: substitute y = x^q mod I."""
        if e_y.is_zero:
            return e_y
        pows = self._y_powers(max(e_y.deg, 1))
        acc = Poly.zero(self.field)
        for i, c in enumerate(e_y.coeffs()):
            if c:
                acc = acc + pows[i].scale(c)
        return acc

    def to_y(self, e_x: Poly):
        """Express an element as a fraction in y: (num, j) with e = num(y)/h1(y)^j."""
        d = max(e_x.deg, 0)
        num = Poly.zero(self.field)
        h0p = Poly.one(self.field)
        h1p = [Poly.one(self.field)]
        for _ in range(d):
            h1p.append(h1p[-1] * self.h1)
        for i, c in enumerate(e_x.coeffs()):
            if c:
                num = num + (h0p * h1p[d - i]).scale(c)
            h0p = h0p * self.h0
        return num, d

    def eval_y(self, f_y: Poly) -> Poly:
        """Value of a polynomial in y, as an element of K."""
        return self.to_x(f_y)

    # -- subgroup bookkeeping ------------------------------------------------------

    def set_subgroup(self, r: int):
        full = self.order - 1
        if full % r:
            raise ValueError("r does not divide q^kn - 1")
        self.r = r
        self.c = full // r

    def subfield_degree(self) -> int:
        """Degree over F_p of the field generated by all h0, h1, I coefficients."""
        field = self.field
        s = 1
        for poly in (self.h0, self.h1, self.I):
            for cf in poly.coeffs():
                d = field.coeff_subfield_degree(cf)
                s = s * d // _gcd(s, d)
        return s

    def frobenius_multiplier(self) -> int:
        """j such that raising to 2^j realizes the factor-base automorphism.

        When (h0, h1, I) are defined over F_{p^s}, the map e -> e^(p^(s*n'))
        fixes x, where n' = n * s' / s ... concretely: x lies in F_{p^(s*n)}
        when I has F_{p^s} coefficients, so e -> e^(p^(s*n)) fixes x and acts
        on F_{q^k} coefficients as Frobenius^(s*n mod deg(F_{q^k})).
        """
        s = self.subfield_degree()
        return s * self.n

    # -- file format ----------------------------------------------------------------

    def to_file_text(self) -> str:
        field = self.field
        lines = [
            f"p {field.p}",
            "tower " + ";".join(f"{d}:" + ",".join(str(c) for c in coeffs) for d, coeffs in field.levels),
            f"q {self.q}",
            f"k {self.k}",
            f"n {self.n}",
            f"d_h {self.d_h}",
            f"h0 {poly_to_text(self.h0)}",
            f"h1 {poly_to_text(self.h1)}",
            f"I {poly_to_text(self.I)}",
            f"r {self.r}",
            f"c {self.c}",
        ]
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_file_text(text: str) -> "FieldRep":
        kv = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition(" ")
            kv[key] = val.strip()
        p = int(kv["p"])
        levels = []
        if kv.get("tower"):
            for part in kv["tower"].split(";"):
                dstr, _, cstr = part.partition(":")
                levels.append((int(dstr), tuple(int(c) for c in cstr.split(","))))
        fld = field_desc(p, levels)
        rep = FieldRep(
            field=fld,
            q=int(kv["q"]),
            k=int(kv["k"]),
            n=int(kv["n"]),
            d_h=int(kv["d_h"]),
            h0=poly_from_text(fld, kv["h0"]),
            h1=poly_from_text(fld, kv["h1"]),
            I=poly_from_text(fld, kv["I"]),
        )
        r = int(kv.get("r", 0))
        if r:
            rep.set_subgroup(r)
        return rep


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def rep_defining_poly(field, q, h0: Poly, h1: Poly) -> Poly:
    """T = h1(X^q) * X - h0(X^q) over the coefficient field (char 2: minus = plus)."""
    return h1.stretch(q).shift(1) + h0.stretch(q)


def verify_representation(rep: FieldRep, expect_n=None):
    """Check every representation invariant; returns (ok, diagnostics list)."""
    diags = []
    field = rep.field
    if field.order != rep.q**rep.k:
        diags.append(f"field order {field.order} != q^k = {rep.q**rep.k}")
    dh = max(rep.h0.deg, rep.h1.deg)
    if dh != rep.d_h:
        diags.append(f"max(deg h0, deg h1) = {dh} != declared d_h = {rep.d_h}")
    if rep.n > rep.q * rep.d_h + 1:
        diags.append(f"n = {rep.n} exceeds q*d_h + 1 = {rep.q * rep.d_h + 1}")
    if rep.h0.gcd(rep.h1).deg != 0:
        diags.append("gcd(h0, h1) is nonconstant")
    if rep.I.deg != rep.n:
        diags.append(f"deg I = {rep.I.deg} != n = {rep.n}")
    if not is_irreducible(rep.I):
        diags.append("I is reducible")
    T = rep_defining_poly(field, rep.q, rep.h0, rep.h1)
    if not (T % rep.I).is_zero:
        diags.append("h1(X^q)X - h0(X^q) is not divisible by I")
    if expect_n is not None and rep.n != expect_n:
        diags.append(f"n = {rep.n} differs from required {expect_n}")
    if rep.r:
        if (rep.order - 1) % rep.r:
            diags.append("r does not divide q^kn - 1")
        if rep.c * rep.r != rep.order - 1:
            diags.append("cofactor mismatch")
        if not _is_probable_prime(rep.r):
            diags.append("r is not prime")
    return (not diags), diags


class SearchExhausted(Exception):
    def __init__(self, tried):
        super().__init__(f"representation search exhausted after {tried} candidates")
        self.tried = tried


def find_representation(field, q, k, n, d_h, subfield_order=None, budget=2_000_000,
                        set_r=False, r_bound=None, r=None):
    """Search (h0, h1) pairs, by increasing coefficient weight then lex order,
    for a pair whose T = h1(X^q)X - h0(X^q) has an irreducible factor of
    degree exactly n.  Sparse pairs come first since every later pipeline
    stage evaluates h0 and h1 constantly.
    """
    if field.order != q**k:
        raise ValueError("field must be F_{q^k}")
    if n > q * d_h + 1:
        raise ValueError(f"n = {n} > q*d_h + 1 = {q * d_h + 1}")
    if subfield_order is None:
        coeff_pool = list(range(field.order))
    else:
        coeff_pool = list(field.subfield_elements(subfield_order))
    if len(coeff_pool) ** (d_h + 1) > 1 << 22:
        # coefficient space too large to enumerate; sample pairs instead
        pair_iter = _pairs_random(field, d_h, coeff_pool, budget)
    else:
        pair_iter = _pairs_by_weight(field, d_h, coeff_pool)
    tried = 0
    for h0, h1 in pair_iter:
        tried += 1
        if tried > budget:
            raise SearchExhausted(tried)
        if h0.gcd(h1).deg != 0:
            continue
        T = rep_defining_poly(field, q, h0, h1)
        if T.is_zero or T.deg < n:
            continue
        I = _degree_n_factor(T, n)
        if I is None:
            continue
        rep = FieldRep(field=field, q=q, k=k, n=n, d_h=d_h, h0=h0, h1=h1, I=I)
        ok, diags = verify_representation(rep)
        if not ok:
            continue
        if r is not None:
            rep.set_subgroup(r)
        elif set_r:
            rep.set_subgroup(discover_subgroup_order(rep.order - 1, bound=r_bound))
        return rep
    raise SearchExhausted(tried)


def _pairs_by_weight(field, d_h, pool):
    """(h0, h1) pairs ordered by total nonzero-coefficient count, then lex."""
    pool_nz = [c for c in pool if c != 0]
    by_weight = {}
    for deg in range(d_h + 1):
        for poly, w in _polys_of_degree(field, deg, pool, pool_nz):
            by_weight.setdefault(w, []).append(poly)
    max_w = 2 * (d_h + 1)
    for total in range(2, max_w + 1):
        batch = []
        for w0 in range(1, total):
            w1 = total - w0
            if w0 not in by_weight or w1 not in by_weight:
                continue
            for h0 in by_weight[w0]:
                for h1 in by_weight[w1]:
                    if max(h0.deg, h1.deg) == d_h:
                        batch.append((h0, h1))
        batch.sort(key=lambda pair: (pair[0].sort_key(), pair[1].sort_key()))
        yield from batch


def _pairs_random(field, d_h, pool, budget):
    """Seeded random (h0, h1) stream for coefficient spaces too large to list."""
    rng = random.Random(_mix("rep-search", field.order, d_h, len(pool)))
    pool_nz = [c for c in pool if c]
    for _ in range(budget):
        d0 = rng.randrange(d_h + 1)
        d1 = rng.choice([d_h, rng.randrange(1, d_h + 1)])
        if max(d0, d1) != d_h:
            d0 = d_h
        h0 = Poly.from_coeffs(field, [rng.choice(pool) for _ in range(d0)] + [rng.choice(pool_nz)])
        h1 = Poly.from_coeffs(field, [rng.choice(pool) for _ in range(d1)] + [rng.choice(pool_nz)])
        yield h0, h1


def _polys_of_degree(field, deg, pool, pool_nz):
    """All polynomials of exact degree deg with coefficients from pool, tagged
    by nonzero-coefficient weight."""
    out = []

    def rec(i, coeffs, w):
        if i == deg:
            for lead in pool_nz:
                out.append((Poly.from_coeffs(field, coeffs + [lead]), w + 1))
            return
        for c in pool:
            rec(i + 1, coeffs + [c], w + (1 if c else 0))

    rec(0, [], 0)
    return out


def _degree_n_factor(T: Poly, n: int):
    """The unique degree-n irreducible factor of T, or None.

    Any cofactor of a degree-n factor has total degree deg T - n < n, so it
    is enough to strip all irreducible factors of degree <= deg T - n and
    check that what remains is irreducible of degree exactly n.
    """
    T = T.monic()
    if T.deg == n:
        return T if is_irreducible(T) else None
    strip_bound = T.deg - n
    if strip_bound >= n:
        # fall back to a full factorization for unbalanced shapes
        best = None
        for g, _m in factor(T).factors:
            if g.deg == n and (best is None or g.sort_key() < best.sort_key()):
                best = g
        return best
    field = T.field
    rem = T
    while rem[0] == 0 and rem.deg > 0:
        rem = rem // Poly.x(field)
    if rem.deg < n:
        return None
    if rem.deg > n:
        base_deg = rem.deg
        ctx = rem.mod_context()
        h = ctx.x_m
        acc = None
        for _d in range(1, strip_bound + 1):
            h = ctx.pow_x_q(h, field.order)
            t = h ^ ctx.x_m
            if t == 0:
                acc = 0
                break
            acc = t if acc is None else ctx.mulmod(acc, t)
        diff = Poly(field, acc, -2)._fix_deg(base_deg - 1)
        g = rem.gcd(diff)
        while g.deg > 0:
            rem = rem // g
            if rem.deg < n:
                return None
            g = rem.gcd(g)
    if rem.deg != n or not is_irreducible(rem):
        return None
    return rem


# -- subgroup order discovery -----------------------------------------------------


def _is_probable_prime(n, rounds=48):
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(_mix("miller-rabin", n))
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho_int(n, rng, budget=1 << 22):
    if n % 2 == 0:
        return 2
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        count = 0
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = _gcd(abs(x - y), n)
            count += 1
            if count > budget:
                raise RuntimeError(f"integer factorization stalled on a {n.bit_length()}-bit composite")
        if d != n:
            return d


def factor_integer(n, rng=None):
    """Full factorization by trial division + Pollard rho; {prime: exponent}."""
    if rng is None:
        rng = random.Random(_mix("rho", n))
    out = {}
    for p in range(2, 10000):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        if p * p > n:
            break
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho_int(m, rng)
        stack.extend([d, m // d])
    return out


def discover_subgroup_order(group_order, bound=None):
    """Largest prime factor of group_order, optionally capped by bound."""
    fac = factor_integer(group_order)
    candidates = [p for p in fac if bound is None or p <= bound]
    if not candidates:
        raise ValueError("no prime subgroup order within the requested bound")
    return max(candidates)
