"""Carry-free dense polynomial arithmetic over binary tower fields.

A polynomial over a p = 2 tower is packed into one big integer.  Every
F_2 coefficient of the fully expanded (multivariate) representation
occupies its own W = 16 bit slot, so that an ordinary integer product
of two packed polynomials computes all convolution column sums without
carry interference; the mod-2 values are then the slot LSBs.  Tower
slots get 2*d positions per level of degree d, which is exactly the
headroom an unreduced product needs, and defining-polynomial folds are
mask/shift/xor passes.

This kernel is what makes degree-1000+ factorization and 4000-bit
exponent towers practical in pure Python; gmpy2 supplies the FFT
multiplication for large operands.
"""

from __future__ import annotations

from functools import lru_cache

import gmpy2
import numpy as np

W = 16  # bits per F_2 coefficient slot; column sums must stay below 2^W
_MPZ_BITS = 12000  # switch integer products to gmpy2 above this size


def _rep_mask(pattern: int, stride_bits: int, count: int) -> int:
    """pattern repeated count times at the given stride."""
    if count <= 0:
        return 0
    return pattern * (((1 << (stride_bits * count)) - 1) // ((1 << stride_bits) - 1))


class PackedField:
    """Packed-layout constants and kernels for one binary tower field."""

    def __init__(self, field):
        if field.p != 2:
            raise NotImplementedError("packed kernels require characteristic 2")
        self.field = field
        degs = [d for d, _ in field.levels] or [1]
        self.level_degs = degs
        self.slots_per_level = [2 * d for d in degs]
        # B[i] = slots below level i inside one element block
        self.blocks = []
        b = 1
        for s in self.slots_per_level:
            self.blocks.append(b)
            b *= s
        self.elem_slots = b
        self.stride = W * b  # bits per X coefficient
        self.deg_bits = field.degree
        # element bit index -> slot index
        slot_of_bit = []
        for bit in range(field.degree):
            rem = bit
            slot = 0
            for lvl, d in enumerate(degs):
                slot += (rem % d) * self.blocks[lvl]
                rem //= d
            slot_of_bit.append(slot)
        self.slot_of_bit = slot_of_bit
        self._slot_of_bit_np = np.asarray(slot_of_bit, dtype=np.int64)
        self._bit_weights = (1 << np.arange(field.degree, dtype=np.uint64)).astype(np.uint64)
        # nonzero defining coefficients per level, with spread bit positions
        self.fold_contribs = []
        for lvl, (d, coeffs) in enumerate(field.levels):
            entries = []
            for e in range(d):
                c = coeffs[e]
                if c:
                    positions = self._spread_positions_sub(c, lvl)
                    entries.append((e, positions))
            self.fold_contribs.append(entries)
        self._elem_mask = _rep_mask(1, W, self.elem_slots)
        self._plans = {}

    # -- element spreading -------------------------------------------------------

    def _spread_positions_sub(self, c, lvl):
        """Bit positions of sub-level element c (levels below lvl only)."""
        out = []
        degs = self.level_degs[:lvl]
        sub_bits = 1
        for d in degs:
            sub_bits *= d
        for bit_idx in range(sub_bits):
            if (c >> bit_idx) & 1:
                rem = bit_idx
                slot = 0
                for l2, d in enumerate(degs):
                    slot += (rem % d) * self.blocks[l2]
                    rem //= d
                out.append(W * slot)
        return tuple(out)

    def spread(self, a: int) -> int:
        """Compact element int -> packed single-coefficient form."""
        v = 0
        bit = 0
        while a:
            if a & 1:
                v |= 1 << (W * self.slot_of_bit[bit])
            a >>= 1
            bit += 1
        return v

    def unspread(self, v: int) -> int:
        a = 0
        for bit, slot in enumerate(self.slot_of_bit):
            if (v >> (W * slot)) & 1:
                a |= 1 << bit
        return a

    # -- masks ---------------------------------------------------------------------

    @lru_cache(maxsize=256)
    def parity_mask(self, nslots: int) -> int:
        return _rep_mask(_rep_mask(1, W, self.elem_slots), self.stride, nslots)

    @lru_cache(maxsize=512)
    def digit_mask(self, lvl: int, t: int, nslots: int) -> int:
        """LSB mask of slots whose level-lvl digit equals t, over nslots X slots."""
        b = self.blocks[lvl]
        inner = _rep_mask(1, W, b)
        outer_count = self.elem_slots // (b * self.slots_per_level[lvl])
        one_elem = _rep_mask(inner, W * b * self.slots_per_level[lvl], outer_count) << (W * t * b)
        return _rep_mask(one_elem, self.stride, nslots)

    # -- level reduction -------------------------------------------------------------

    def _fold_plan(self, nslots: int):
        """Flat (mask, shifts) sequence realizing the full level reduction."""
        plan = self._plans.get(nslots)
        if plan is not None:
            return plan
        plan = []
        order = []
        nlevels = len(self.level_degs)
        for i in range(nlevels):
            order.append(i)
            order.extend(range(i - 1, -1, -1))
        for lvl in order:
            d = self.level_degs[lvl]
            if d == 1:
                continue
            b16 = W * self.blocks[lvl]
            for t in range(2 * d - 2, d - 1, -1):
                shifts = tuple(
                    (d - e) * b16 - pos
                    for e, positions in self.fold_contribs[lvl]
                    for pos in positions
                )
                plan.append((self.digit_mask(lvl, t, nslots), shifts))
        if len(self._plans) > 512:
            self._plans.clear()
        self._plans[nslots] = plan
        return plan

    def fold_all(self, P: int, nslots: int) -> int:
        for mask, shifts in self._fold_plan(nslots):
            H = P & mask
            if H:
                P ^= H
                for sh in shifts:
                    P ^= H >> sh
        return P

    # -- core products -------------------------------------------------------------------

    def _imul(self, A: int, B: int) -> int:
        if A.bit_length() + B.bit_length() > _MPZ_BITS:
            return int(gmpy2.mpz(A) * gmpy2.mpz(B))
        return A * B

    def mul(self, A: int, da: int, B: int, db: int) -> int:
        """Product of level-reduced packed polynomials of the given degrees."""
        if A == 0 or B == 0:
            return 0
        if (min(da, db) + 1) * self.deg_bits >= (1 << W):
            raise OverflowError("packed column sums would overflow; split the product")
        n = da + db + 1
        P = self._imul(A, B) & self.parity_mask(n)
        return self.fold_all(P, n)

    def sqr(self, A: int, da: int) -> int:
        return self.mul(A, da, A, da)

    def mul_elem(self, A: int, nslots: int, c: int) -> int:
        """Product with a constant element (c compact), then level fold."""
        if c == 0 or A == 0:
            return 0
        if c == 1:
            return A
        P = 0
        for bit, slot in enumerate(self.slot_of_bit):
            if (c >> bit) & 1:
                P ^= A << (W * slot)
        return self.fold_all(P, nslots)

    # -- packing ------------------------------------------------------------------------

    def pack(self, coeffs) -> int:
        if len(coeffs) > 32:
            return self._pack_np(coeffs)
        P = 0
        for j, c in enumerate(coeffs):
            if c:
                P |= self.spread(c) << (j * self.stride)
        return P

    def _pack_np(self, coeffs):
        L = len(coeffs)
        arr = np.asarray(coeffs, dtype=np.uint64)
        bits = ((arr[:, None] >> np.arange(self.deg_bits, dtype=np.uint64)) & np.uint64(1)).astype(np.uint8)
        stride_bytes = self.stride // 8
        out = np.zeros(L * stride_bytes, dtype=np.uint8)
        byte_pos = (self._slot_of_bit_np * (W // 8))[None, :] + (np.arange(L, dtype=np.int64) * stride_bytes)[:, None]
        out[byte_pos.ravel()] = bits.ravel()
        return int.from_bytes(out.tobytes(), "little")

    def unpack(self, P: int, deg: int):
        if deg < 0:
            return []
        L = deg + 1
        if L > 32:
            return self._unpack_np(P, L)
        return [self.x_coeff(P, j) for j in range(L)]

    def _unpack_np(self, P: int, L: int):
        stride_bytes = self.stride // 8
        raw = P.to_bytes(L * stride_bytes + 16, "little")
        arr = np.frombuffer(raw[: L * stride_bytes], dtype=np.uint8)
        byte_pos = (self._slot_of_bit_np * (W // 8))[None, :] + (np.arange(L, dtype=np.int64) * stride_bytes)[:, None]
        bits = (arr[byte_pos] & 1).astype(np.uint64)
        vals = bits @ self._bit_weights
        return [int(v) for v in vals]

    def x_coeff(self, P: int, j: int) -> int:
        return self.unspread((P >> (j * self.stride)) & self._elem_mask)

    def degree_of(self, P: int, upper: int) -> int:
        """True degree given an upper bound; -1 for the zero polynomial."""
        if P == 0:
            return -1
        j = min(upper, P.bit_length() // self.stride)
        while j >= 0:
            if (P >> (j * self.stride)) & self._elem_mask:
                return j
            j -= 1
        return -1

    def trunc(self, P: int, nslots: int) -> int:
        return P & ((1 << (nslots * self.stride)) - 1)

    def shift_x(self, P: int, k: int) -> int:
        return P << (k * self.stride)

    # -- division -----------------------------------------------------------------------

    def divmod(self, A: int, da: int, B: int, db: int, inv_lead=None):
        """(quotient, remainder, rdeg) for B not necessarily monic."""
        field = self.field
        if B == 0:
            raise ZeroDivisionError("polynomial division by zero")
        if da < db:
            return 0, A, da
        lead = self.x_coeff(B, db)
        if lead != 1:
            il = field.inv(lead) if inv_lead is None else inv_lead
            Bm = self.mul_elem(B, db + 1, il)
            Q, R, rd = self.divmod(A, da, Bm, db)
            # A = Q*Bm + R = (Q*il)*B + R
            Qa = self.mul_elem(Q, da - db + 1, il)
            return Qa, R, rd
        Q = 0
        R = A
        dr = self.degree_of(R, da)
        while dr >= db:
            c = self.x_coeff(R, dr)
            sh = dr - db
            Q |= self.spread(c) << (sh * self.stride)
            R ^= self.mul_elem(B, db + 1, c) << (sh * self.stride)
            dr = self.degree_of(R, dr - 1)
        return Q, R, dr

    def gcd(self, A: int, da: int, B: int, db: int):
        """Monic gcd of packed polynomials; returns (G, dg)."""
        field = self.field
        if da < db:
            A, da, B, db = B, db, A, da
        while B:
            _, R, dr = self.divmod(A, da, B, db)
            A, da, B, db = B, db, R, dr
        if A == 0:
            return 0, -1
        lead = self.x_coeff(A, da)
        if lead != 1:
            A = self.mul_elem(A, da + 1, field.inv(lead))
        return A, da


_PACKED_CACHE: dict = {}


def packed_field(field) -> PackedField:
    pf = _PACKED_CACHE.get(field)
    if pf is None:
        pf = PackedField(field)
        _PACKED_CACHE[field] = pf
    return pf


class PackedModulus:
    """Montgomery-style residue arithmetic mod a fixed monic packed polynomial.

    Residues are kept in Montgomery form A*X^D mod f, so reduction after a
    product is two truncated multiplications and a shift, with no reversals.
    Requires f(0) != 0 (true for every irreducible modulus other than X).
    """

    def __init__(self, pf: PackedField, F: int, D: int):
        self.pf = pf
        self.field = pf.field
        self.F = F
        self.D = D
        if pf.x_coeff(F, D) != 1:
            raise ValueError("modulus must be monic")
        f0 = pf.x_coeff(F, 0)
        self.invertible = f0 != 0
        if self.invertible:
            self.Finv = self._inverse_mod_xn(F, D)  # f^{-1} mod X^D
        # X^{2D} mod f, used to enter Montgomery form
        P = pf.shift_x(1, 2 * D)
        _, R, _ = pf.divmod(P, 2 * D, F, D)
        self.R2 = R
        self.one_m = self.to_mont(1)  # X^D mod f
        self.x_m = self.to_mont(pf.shift_x(1, 1))

    def _inverse_mod_xn(self, F, prec_target):
        pf = self.pf
        field = self.field
        f0 = pf.x_coeff(F, 0)
        R = pf.spread(field.inv(f0))
        prec = 1
        while prec < prec_target:
            prec = min(2 * prec, prec_target)
            Ft = pf.trunc(F, prec)
            E = pf.mul(Ft, prec - 1, R, prec - 1)
            E = pf.trunc(E, prec) ^ pf.spread(1)
            if E:
                R = (R ^ pf.trunc(pf.mul(R, prec - 1, E, prec - 1), prec))
        return R

    def redc(self, T: int, dT: int) -> int:
        """T * X^{-D} mod f for deg T <= 2D-1."""
        pf = self.pf
        D = self.D
        m = pf.trunc(pf.mul(pf.trunc(T, D), D - 1, self.Finv, D - 1), D)
        T2 = T ^ pf.mul(m, D - 1, self.F, D)
        return T2 >> (D * pf.stride)

    def to_mont(self, A: int) -> int:
        pf = self.pf
        D = self.D
        if A == 0:
            return 0
        dA = pf.degree_of(A, 10**9)
        if dA >= D:
            _, A, dA = pf.divmod(A, dA, self.F, D)
            if A == 0:
                return 0
        return self.redc(pf.mul(A, D - 1, self.R2, D - 1), 2 * D - 2)

    def from_mont(self, Am: int) -> int:
        if Am == 0:
            return 0
        return self.redc(Am, self.D - 1)

    def mulmod(self, Am: int, Bm: int) -> int:
        if Am == 0 or Bm == 0:
            return 0
        return self.redc(self.pf.mul(Am, self.D - 1, Bm, self.D - 1), 2 * self.D - 2)

    def sqrmod(self, Am: int) -> int:
        return self.mulmod(Am, Am)

    def pow_x_q(self, Am: int, q: int) -> int:
        """Am^q for q a power of 2 (repeated modular squaring)."""
        k = q.bit_length() - 1
        for _ in range(k):
            Am = self.sqrmod(Am)
        return Am

    def pow(self, A: int, e: int) -> int:
        """A^e mod f (A, result in plain form)."""
        if e < 0:
            raise ValueError("negative exponents need an inverse; reduce first")
        Am = self.to_mont(A)
        R = self.one_m
        if e:
            bits = bin(e)[2:]
            R = Am
            for b in bits[1:]:
                R = self.sqrmod(R)
                if b == "1":
                    R = self.mulmod(R, Am)
        return self.from_mont(R)

    def pow_mont(self, Am: int, e: int) -> int:
        """Montgomery-form exponentiation (input and output in Montgomery form)."""
        R = self.one_m
        if e:
            bits = bin(e)[2:]
            R = Am
            for b in bits[1:]:
                R = self.sqrmod(R)
                if b == "1":
                    R = self.mulmod(R, Am)
        return R
