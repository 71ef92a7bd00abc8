"""Smoothness testing by iterated Frobenius powers.

A degree-n polynomial f over F_q is declared m-smooth when

    t := f' * prod_{i=floor(m/2)+1}^{m} (X^(q^i) - X)   is 0 mod f.

Every irreducible factor of degree d in (m/2, m] divides the i = d term,
and every d <= m/2 divides some i in that interval, so an m-smooth f
drives t to zero; the derivative factor supplies the multiplicities.
The test can report a false positive when some irreducible factor's
multiplicity is a multiple of the characteristic (the derivative drops
it), so callers that act on a positive confirm by full factorization.

The powers [X^(q^i)] mod f are produced by one of two table strategies
(identical outputs, different operation counts) or by a plain
square-and-reduce fast path.  The table strategies tally base-field
multiplications at coefficient granularity so measured counts can be
compared against the n^2(p^r + s*m) and n^2(p^r + s + n + m) models.
"""

from __future__ import annotations

from .poly import Poly
from .packed import packed_field


class OpCounter:
    """Tallies F_q-multiplications at the generic dense-arithmetic
    granularity of the cost model: n per table shift, n^2 per power-map
    application, 2 n^2 per general residue product.  Sparsity shortcuts
    the implementation takes (zero leading coefficients, sub-degree
    shifts) are not discounted, so measured totals track the
    n^2 (p^r + s m) style formulas."""

    def __init__(self):
        self.fq_mults = 0

    def add(self, n):
        self.fq_mults += n


class _NullCounter:
    def add(self, n):
        pass


_NULL = _NullCounter()


def _splittings(p, q):
    """All (r, s) with p^(r*s) = q."""
    l = 0
    m = 1
    while m < q:
        m *= p
        l += 1
    return [(r, l // r) for r in range(1, l + 1) if l % r == 0]


def strategy_cost_model(p, r, s, n, m, strategy):
    """Model operation count for computing [X^(q^i)], i = 1..m."""
    if strategy == 1:
        return n * n * (p**r + s * m)
    if strategy == 2:
        return n * n * (p**r + s + n + m)
    raise ValueError("strategy must be 1 or 2")


def select_strategy(p, q, n, m):
    """(strategy, (r, s)) minimizing the model cost; ties prefer strategy 1."""
    best = None
    for strat in (1, 2):
        for r, s in _splittings(p, q):
            cost = strategy_cost_model(p, r, s, n, m, strat)
            if best is None or cost < best[0]:
                best = (cost, strat, (r, s))
    return best[1], best[2]


class _Residues:
    """Residue arithmetic mod f on packed plain-form values, with the
    model operation counter threaded through."""

    def __init__(self, f: Poly, counter):
        self.f = f
        self.n = f.deg
        self.field = f.field
        self.pf = packed_field(f.field)
        self.F = f.packed
        self.counter = counter

    def shift_reduce(self, A):
        """A * X mod f; billed at n multiplications per shift."""
        pf = self.pf
        A <<= pf.stride
        c = pf.x_coeff(A, self.n)
        if c:
            A ^= pf.mul_elem(self.F, self.n + 1, c)
        self.counter.add(self.n)
        return A

    def scale_accum(self, acc, T, c):
        """acc + c*T for an element c (part of an n^2 map application)."""
        if c == 0:
            return acc
        if c == 1:
            return acc ^ T
        return acc ^ self.pf.mul_elem(T, self.n, c)

    def mul(self, A, B):
        """General residue product; model cost 2 n^2."""
        self.counter.add(2 * self.n * self.n)
        if A == 0 or B == 0:
            return 0
        if self.f[0] != 0:
            ctx = self.f.mod_context()
            return ctx.from_mont(ctx.mulmod(ctx.to_mont(A), ctx.to_mont(B)))
        pf = self.pf
        da = pf.degree_of(A, self.n - 1)
        db = pf.degree_of(B, self.n - 1)
        P = pf.mul(A, da, B, db)
        _, R, _ = pf.divmod(P, da + db, self.F, self.n)
        return R

    def coeffs(self, A):
        return self.pf.unpack(A, self.n - 1)


def _power_table(res: _Residues, pr):
    """[X^(j*p^r) mod f] for j = 0..n-1 by consecutive shifts."""
    out = [res.pf.spread(1)]
    cur = out[0]
    for j in range(1, res.n):
        for _ in range(pr):
            cur = res.shift_reduce(cur)
        out.append(cur)
    return out


def _apply_power_map(res: _Residues, table, A, pr):
    """A^(p^r) mod f given the shift table; one n^2 map application."""
    field = res.field
    out = 0
    for j, c in enumerate(res.coeffs(A)):
        if c:
            out = res.scale_accum(out, table[j], field.pow(c, pr))
    res.counter.add(res.n * res.n)
    return out


def _powers_strategy1(res: _Residues, q, m, r, s, p):
    pr = p**r
    table = _power_table(res, pr)
    powers = []
    cur = table[1]  # X^(p^r)
    if s == 1:
        powers.append(cur)
    for i in range(2, s * m + 1):
        cur = _apply_power_map(res, table, cur, pr)
        if i % s == 0:
            powers.append(cur)
    return powers


def _powers_strategy2(res: _Residues, q, m, r, s, p):
    pr = p**r
    # step 1: [X^q] via the p^r table route
    table = _power_table(res, pr)
    xq = table[1]
    for _ in range(2, s + 1):
        xq = _apply_power_map(res, table, xq, pr)
    # step 2: alternative precomputation of the multiply-by-X^q map
    shifted = [xq]
    for _ in range(1, res.n):
        shifted.append(res.shift_reduce(shifted[-1]))

    def mul_by_xq(A):
        out = 0
        for j, c in enumerate(res.coeffs(A)):
            if c:
                out = res.scale_accum(out, shifted[j], c)
        res.counter.add(res.n * res.n)
        return out

    qtable = [res.pf.spread(1), xq]
    for _ in range(2, res.n):
        qtable.append(mul_by_xq(qtable[-1]))

    def apply_q_map(A):
        field = res.field
        out = 0
        for j, c in enumerate(res.coeffs(A)):
            if c:
                out = res.scale_accum(out, qtable[j], field.pow(c, q))
        res.counter.add(res.n * res.n)
        return out

    powers = [xq]
    for _ in range(2, m + 1):
        powers.append(apply_q_map(powers[-1]))
    return powers


def frobenius_powers(f: Poly, i_range, strategy=None, rs=None, counter=None):
    """Residues X^(q^i) mod f for i in i_range, by table strategy 1 or 2."""
    i_list = sorted(set(int(i) for i in i_range))
    if not i_list or i_list[0] < 1:
        raise ValueError("i_range must contain integers >= 1")
    f = f.monic()
    field = f.field
    p, q = field.p, field.order
    m = i_list[-1]
    if strategy is None:
        strategy, best_rs = select_strategy(p, q, f.deg, m)
        rs = rs or best_rs
    elif rs is None:
        rs = min(_splittings(p, q), key=lambda t: strategy_cost_model(p, t[0], t[1], f.deg, m, strategy))
    res = _Residues(f, counter or _NULL)
    r, s = rs
    powers = (_powers_strategy1 if strategy == 1 else _powers_strategy2)(res, q, m, r, s, p)
    out = []
    for i in i_list:
        P = powers[i - 1]
        out.append(Poly(field, P, -2)._fix_deg(f.deg - 1))
    return out


def smoothness_test(f: Poly, m: int, strategy="fast", counter=None) -> bool:
    """True iff t = f' * prod (X^(q^i) - X) vanishes mod f (see module doc)."""
    if f.is_zero:
        raise ValueError("smoothness of the zero polynomial is undefined")
    if m < 1:
        raise ValueError("smoothness bound must be >= 1")
    if f.deg <= m:
        return True
    f = f.monic()
    field = f.field
    fp = f.derivative()
    if fp.is_zero:
        return True  # square; the caveat case, callers confirm by factoring
    i0 = m // 2 + 1
    if strategy == "fast":
        return _smooth_fast(f, fp, i0, m)
    counter = counter or _NULL
    res = _Residues(f, counter)
    powers = frobenius_powers(f, range(i0, m + 1), strategy=strategy, counter=counter)
    x_plain = res.pf.shift_x(res.pf.spread(1), 1)
    t = fp.packed
    for P in powers:
        t = res.mul(t, P.packed ^ x_plain)
    return t == 0


def _smooth_fast(f, fp, i0, m):
    field = f.field
    g = f
    if g[0] == 0:
        g = g // Poly.x(field)  # X factors are 1-smooth; keep the modulus invertible
        while g[0] == 0 and g.deg > 0:
            g = g // Poly.x(field)
        if g.deg <= m:
            return True
        fp = fp % g
        if fp.is_zero:
            return True
    ctx = g.mod_context()
    q = field.order
    h = ctx.x_m
    for _ in range(i0):
        h = ctx.pow_x_q(h, q)
    acc = ctx.to_mont(fp.packed)
    for i in range(i0, m + 1):
        if acc == 0:
            return True
        if i > i0:
            h = ctx.pow_x_q(h, q)
        acc = ctx.mulmod(acc, h ^ ctx.x_m)
    return acc == 0
