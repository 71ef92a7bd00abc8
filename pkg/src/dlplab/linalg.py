"""Sparse linear algebra modulo the prime subgroup order r.

The relation matrix has one row per relation over representative columns
(Galois-orbit multipliers folded into the coefficients) and is solved for
a kernel vector by Lanczos on B = A^T D A with a random diagonal D; self-
orthogonality breakdowns restart with fresh randomization.  Arithmetic is
exact mod r: a numpy Montgomery kernel (32-bit limb products on uint64,
wrapping semantics) covers any odd r < 2^63.5-ish word sizes up to 2^64,
and a plain Python path covers everything else (r up to 1024 bits per the
contract, at pure-Python speed).

cost_model evaluates the N^2 (2 W ADD + 2 SQR + 3 MULMOD) operation model
for a full Lanczos solve.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra.fields import _mix

M32 = np.uint64(0xFFFFFFFF)
U64 = np.uint64
S32 = np.uint64(32)


def _mulfull_ws(a, b, ws):
    """128-bit products of uint64 arrays into preallocated buffers.

    Returns (hi, lo) views living in ws[1] and ws[4]; ws needs six
    nnz-sized uint64 buffers.
    """
    t0, t1, t2, t3, t4, t5 = ws
    np.bitwise_and(a, M32, out=t0)   # a0
    np.right_shift(a, S32, out=t1)   # a1
    np.bitwise_and(b, M32, out=t2)   # b0
    np.right_shift(b, S32, out=t3)   # b1
    np.multiply(t0, t2, out=t4)      # ll
    np.multiply(t0, t3, out=t0)      # lh
    np.multiply(t1, t2, out=t2)      # hl
    np.multiply(t1, t3, out=t1)      # hh
    np.right_shift(t4, S32, out=t3)
    np.bitwise_and(t0, M32, out=t5)
    np.add(t3, t5, out=t3)
    np.bitwise_and(t2, M32, out=t5)
    np.add(t3, t5, out=t3)           # mid
    np.bitwise_and(t4, M32, out=t4)
    np.left_shift(t3, S32, out=t5)
    np.bitwise_or(t5, t4, out=t4)    # lo
    np.right_shift(t0, S32, out=t0)
    np.add(t1, t0, out=t1)
    np.right_shift(t2, S32, out=t2)
    np.add(t1, t2, out=t1)
    np.right_shift(t3, S32, out=t3)
    np.add(t1, t3, out=t1)           # hi
    return t1, t4


@dataclass
class SparseMatrix:
    n_rows: int
    n_cols: int
    r: int
    rows: tuple  # tuple of tuples of (col, coeff mod r)

    @property
    def avg_row_weight(self):
        if not self.n_rows:
            return 0.0
        return sum(len(row) for row in self.rows) / self.n_rows

    def to_file_text(self):
        lines = [f"{self.n_rows} {self.n_cols} {self.r}"]
        for row in self.rows:
            lines.append(" ".join(f"{c}:{v}" for c, v in row))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_file_text(text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        n, m, r = (int(t) for t in lines[0].split())
        rows = []
        for ln in lines[1:]:
            row = []
            for tok in ln.split():
                c, _, v = tok.partition(":")
                row.append((int(c), int(v)))
            rows.append(tuple(row))
        return SparseMatrix(n_rows=n, n_cols=m, r=r, rows=tuple(rows))


@dataclass
class LogDatabase:
    """Factor-base index -> logarithm mod r, with provenance tags."""

    r: int
    logs: dict = dc_field(default_factory=dict)   # index -> int
    provenance: dict = dc_field(default_factory=dict)

    def set(self, idx, value, prov):
        self.logs[idx] = value % self.r
        self.provenance[idx] = prov

    def get(self, idx):
        return self.logs.get(idx)

    def __len__(self):
        return len(self.logs)

    def to_file_text(self):
        lines = [f"# r {self.r}"]
        for idx in sorted(self.logs):
            lines.append(f"{idx} {self.logs[idx]} {self.provenance.get(idx, '?')}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_file_text(text):
        r = None
        logs = {}
        prov = {}
        for ln in text.splitlines():
            ln = ln.strip()
            if not ln:
                continue
            if ln.startswith("#"):
                parts = ln.split()
                if len(parts) >= 3 and parts[1] == "r":
                    r = int(parts[2])
                continue
            idx_s, val_s, p = ln.split(None, 2)
            logs[int(idx_s)] = int(val_s)
            prov[int(idx_s)] = p
        db = LogDatabase(r=r)
        db.logs = logs
        db.provenance = prov
        return db


def build_matrix(relations, fb, rep, h1_mode="auto"):
    """Assemble the relation matrix over representative columns.

    Orbit members fold in as coefficient * p^(frob_sn * j) mod r.  The h1
    column is expanded into base factors when possible ("auto"/"expand")
    or kept as a trailing virtual column ("column").  Units vanish mod r
    because gcd(q^k - 1, r) = 1, which is asserted here.
    """
    from .relations import expand_h1

    r = rep.r
    if r <= 1:
        raise ValueError("representation has no subgroup order assigned")
    if _gcd(rep.field.order - 1, r) != 1:
        raise ValueError("units do not vanish mod r: gcd(q^k - 1, r) != 1")
    p = rep.field.p
    col_of = {ridx: i for i, ridx in enumerate(fb.representatives)}
    n_cols = len(col_of)
    h1_entries = None
    if h1_mode in ("auto", "expand"):
        h1_entries = expand_h1(rep, fb)
        if h1_entries is None and h1_mode == "expand":
            raise ValueError("h1 has factors above the base bound; cannot expand")
    h1_col = None
    if h1_entries is None:
        h1_col = n_cols
        n_cols += 1

    def fold(idx, e, acc):
        ridx = fb.orbit_rep[idx]
        j = fb.orbit_exp[idx]
        mult = pow(p, fb.frob_sn * j, r) if fb.frob_sn and j else 1
        c = col_of[ridx]
        acc[c] = (acc.get(c, 0) + e * mult) % r

    rows = []
    for rel in relations:
        acc = {}
        for idx, e in rel.entries:
            fold(idx, e, acc)
        if rel.h1_exp:
            if h1_entries is not None:
                ent, _unit = h1_entries
                for idx, e in ent:
                    fold(idx, e * rel.h1_exp, acc)
            else:
                acc[h1_col] = (acc.get(h1_col, 0) + rel.h1_exp) % r
        acc = {c: v for c, v in acc.items() if v}
        if acc:
            rows.append(tuple(sorted(acc.items())))
    return SparseMatrix(n_rows=len(rows), n_cols=n_cols, r=r, rows=tuple(rows)), col_of, h1_col


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def cost_model(N, W, t_add, t_sqr, t_mulmod):
    """N^2 (2 W ADD + 2 SQR + 3 MULMOD), in the units of the timings given."""
    return N * N * (2 * W * t_add + 2 * t_sqr + 3 * t_mulmod)


# -- Montgomery kernels (numpy, odd r < 2^64) ------------------------------------------


class Mont64:
    def __init__(self, r):
        if r % 2 == 0 or r >= 1 << 64 or r < 3:
            raise ValueError("Mont64 needs an odd modulus below 2^64")
        self.r = r
        self.r_np = U64(r)
        self.nprime = U64((-pow(r, -1, 1 << 64)) % (1 << 64))
        self.R = (1 << 64) % r
        self.R2 = (1 << 128) % r
        self.Rinv2 = pow(self.R, -2, r)
        self.comp = U64(((1 << 64) - r) % (1 << 64))  # 2^64 - r for wrap fixups

    @staticmethod
    def _mulfull(a, b):
        a0 = a & M32
        a1 = a >> U64(32)
        b0 = b & M32
        b1 = b >> U64(32)
        ll = a0 * b0
        lh = a0 * b1
        hl = a1 * b0
        hh = a1 * b1
        mid = (ll >> U64(32)) + (lh & M32) + (hl & M32)
        lo = (mid << U64(32)) | (ll & M32)
        hi = hh + (lh >> U64(32)) + (hl >> U64(32)) + (mid >> U64(32))
        return hi, lo

    def _redc(self, hi, lo):
        m = lo * self.nprime
        mr_hi, mr_lo = self._mulfull(m, self.r_np)
        carry = (lo != 0).astype(np.uint64)
        t = hi + mr_hi
        ov = t < hi
        t2 = t + carry
        ov |= t2 < t
        res = np.where(ov, t2 + self.comp, t2)
        big = (~ov) & (res >= self.r_np)
        return np.where(big, res - self.r_np, res)

    def mul(self, a, b):
        hi, lo = self._mulfull(a, b)
        return self._redc(hi, lo)

    def add(self, a, b):
        s = a + b
        ov = s < a
        res = np.where(ov, s + self.comp, s)
        big = (~ov) & (res >= self.r_np)
        return np.where(big, res - self.r_np, res)

    def sub(self, a, b):
        d = a - b
        under = a < b
        return np.where(under, d - self.comp, d)

    def to_mont(self, arr):
        return self.mul(arr.astype(np.uint64), np.uint64(self.R2 % self.r))

    def from_mont(self, arr):
        zero = np.zeros_like(arr)
        return self._redc(zero, arr)

    def scalar_to_mont(self, c):
        return U64((c << 64) % self.r)

    def dot_plain(self, a, b):
        """Exact dot product of Montgomery vectors as a plain value mod r."""
        hi, lo = self._mulfull(a, b)
        # accumulate the unreduced 128-bit products in 32-bit split sums;
        # each partial sum stays below len * 2^32 <= 2^63 for len < 2^31
        s_ll = int(np.sum(lo & M32))
        s_lh = int(np.sum(lo >> U64(32)))
        s_hl = int(np.sum(hi & M32))
        s_hh = int(np.sum(hi >> U64(32)))
        total = s_ll + (s_lh << 32) + (s_hl << 64) + (s_hh << 96)
        # total = sum a_i b_i * R^2 (Montgomery forms); strip both R factors
        return (total % self.r) * self.Rinv2 % self.r


class CsrMont:
    """CSR matrix in Montgomery form with its transpose, for A^T D A products."""

    def __init__(self, matrix: SparseMatrix, mont: Mont64):
        self.mont = mont
        self.n_rows = matrix.n_rows
        self.n_cols = matrix.n_cols
        indptr = [0]
        cols = []
        vals = []
        for row in matrix.rows:
            for c, v in row:
                cols.append(c)
                vals.append(v % matrix.r)
            indptr.append(len(cols))
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.cols = np.asarray(cols, dtype=np.int64)
        self.vals = mont.to_mont(np.asarray(vals, dtype=np.uint64))
        # transpose in CSC-ish form
        order = np.argsort(self.cols, kind="stable")
        self.t_rows = np.repeat(np.arange(self.n_rows, dtype=np.int64),
                                np.diff(self.indptr))[order]
        self.t_vals = self.vals[order]
        t_cols = self.cols[order]
        self.t_indptr = np.zeros(self.n_cols + 1, dtype=np.int64)
        np.add.at(self.t_indptr, t_cols + 1, 1)
        self.t_indptr = np.cumsum(self.t_indptr)
        nnz = len(self.cols)
        self.starts = np.minimum(self.indptr[:-1], max(nnz - 1, 0))
        self.t_starts = np.minimum(self.t_indptr[:-1], max(nnz - 1, 0))
        re = np.diff(self.indptr) == 0
        ce = np.diff(self.t_indptr) == 0
        self.row_empty = re if re.any() else None
        self.col_empty = ce if ce.any() else None
        self._ws = [np.empty(nnz, dtype=np.uint64) for _ in range(6)]
        self._gather = np.empty(nnz, dtype=np.uint64)

    def _seg_sum_raw(self, hi, lo, starts, empty, n_out):
        """Row sums of raw 128-bit products, one REDC at row granularity.

        Input entries are x*y*R^2 < r^2; the output is the Montgomery form
        of each row sum (one factor of R stripped by the REDC).
        """
        mont = self.mont
        s_ll = np.add.reduceat(lo & M32, starts)
        s_lh = np.add.reduceat(lo >> U64(32), starts)
        s_hl = np.add.reduceat(hi & M32, starts)
        s_hh = np.add.reduceat(hi >> U64(32), starts)
        if empty is not None:
            z = U64(0)
            s_ll = np.where(empty, z, s_ll)
            s_lh = np.where(empty, z, s_lh)
            s_hl = np.where(empty, z, s_hl)
            s_hh = np.where(empty, z, s_hh)
        # exact 192-bit value (a2, a1, a0) = sum, with a2 small
        a0 = (s_lh << U64(32)) + s_ll
        c0 = (a0 < s_ll).astype(np.uint64)
        a1h = (s_lh >> U64(32)) + c0
        a1l = (s_hh << U64(32)) + s_hl
        c1 = (a1l < s_hl).astype(np.uint64)
        a1 = a1h + a1l
        c2 = (a1 < a1l).astype(np.uint64)
        a2 = (s_hh >> U64(32)) + c1 + c2
        # fold a2 * 2^128 == a2 * R2 (mod r) into (a1, a0); work mod r in the
        # high word, which only shifts V by multiples of r * 2^64
        fh, fl = self._mulfull(a2, np.uint64(mont.R2 % mont.r))
        a0b = a0 + fl
        cb = (a0b < fl).astype(np.uint64)
        a1b = mont.add(mont.add(a1 % mont.r_np, fh % mont.r_np), cb)
        return mont._redc(a1b, a0b)

    @staticmethod
    def _mulfull(a, b):
        return Mont64._mulfull(a, b)

    def matvec(self, v):
        """A @ v with v and the result in Montgomery form."""
        np.take(v, self.cols, out=self._gather)
        hi, lo = _mulfull_ws(self.vals, self._gather, self._ws)
        return self._seg_sum_raw(hi, lo, self.starts, self.row_empty, self.n_rows)

    def rmatvec(self, u):
        """A^T @ u in Montgomery form."""
        np.take(u, self.t_rows, out=self._gather)
        hi, lo = _mulfull_ws(self.t_vals, self._gather, self._ws)
        return self._seg_sum_raw(hi, lo, self.t_starts, self.col_empty, self.n_cols)


class LanczosFailure(Exception):
    pass


def lanczos_solve(matrix: SparseMatrix, r: int, seed=0, max_restarts=8):
    """A nonzero kernel vector v (plain ints mod r) with A v = 0 mod r.

    Runs Lanczos on B = A^T D A against b = B u for random u, so that
    x - u lies in ker B; restarts with fresh D, u on breakdown.  r must be
    prime (tiny factors are rejected up front).
    """
    if r < 2:
        raise ValueError("modulus must exceed 1")
    for p in (2, 3, 5, 7, 11, 13):
        if r % p == 0 and r != p:
            raise ValueError(f"r has a tiny factor {p}; a prime modulus is required")
    if matrix.n_rows == 0 or matrix.n_cols == 0:
        raise LanczosFailure("empty matrix")
    if r % 2 and r < (1 << 64):
        return _lanczos_np(matrix, r, seed, max_restarts)
    return _lanczos_py(matrix, r, seed, max_restarts)


def _lanczos_np(matrix, r, seed, max_restarts):
    mont = Mont64(r)
    A = CsrMont(matrix, mont)
    rng = random.Random(_mix("lanczos", seed, r, matrix.n_rows, matrix.n_cols))
    n = matrix.n_cols
    for attempt in range(max_restarts):
        D = mont.to_mont(np.asarray([rng.randrange(1, r) for _ in range(matrix.n_rows)],
                                    dtype=np.uint64))

        def Bv(v):
            t = A.matvec(v)
            t = mont.mul(t, D)
            return A.rmatvec(t)

        u = mont.to_mont(np.asarray([rng.randrange(r) for _ in range(n)], dtype=np.uint64))
        b = Bv(u)
        if not b.any():
            v = mont.from_mont(u)
            if v.any() and not mont.from_mont(A.matvec(u)).any():
                return [int(x) for x in v]
            continue
        x = _lanczos_core_np(Bv, b, n, mont, max_iters=2 * n + 64)
        if x is None:
            continue
        v = mont.sub(x, u)
        if not v.any():
            continue
        if mont.from_mont(A.matvec(v)).any():
            continue
        return [int(y) for y in mont.from_mont(v)]
    raise LanczosFailure(f"no kernel vector after {max_restarts} randomized restarts")


def _lanczos_core_np(Bv, b, n, mont, max_iters):
    r = mont.r
    inv = lambda t: pow(t, -1, r)
    w_prev = None
    bw_prev = None
    d_prev = None
    w = b.copy()
    x = np.zeros(n, dtype=np.uint64)
    for _ in range(max_iters):
        bw = Bv(w)
        d = mont.dot_plain(w, bw)
        if d == 0:
            return None  # self-orthogonal: breakdown, caller restarts
        proj = (mont.dot_plain(w, b) * inv(d)) % r
        x = mont.add(x, mont.mul(w, mont.scalar_to_mont(proj)))
        c1 = (mont.dot_plain(bw, bw) * inv(d)) % r
        w_next = mont.sub(bw, mont.mul(w, mont.scalar_to_mont(c1)))
        if w_prev is not None:
            c2 = (mont.dot_plain(bw, bw_prev) * inv(d_prev)) % r
            w_next = mont.sub(w_next, mont.mul(w_prev, mont.scalar_to_mont(c2)))
        w_prev, bw_prev, d_prev = w, bw, d
        w = w_next
        if not w.any():
            # converged: check B x = b
            if np.array_equal(Bv(x), b):
                return x
            return None
    return None


def _lanczos_py(matrix, r, seed, max_restarts):
    """Reference path for moduli beyond the word-size kernel (r up to 1024 bits)."""
    rng = random.Random(_mix("lanczos-py", seed, r, matrix.n_rows))
    rows = [list(row) for row in matrix.rows]
    n = matrix.n_cols
    cols_rows = [[] for _ in range(n)]
    for i, row in enumerate(rows):
        for c, v in row:
            cols_rows[c].append((i, v))

    def matvec(v):
        return [sum(c_v * v[c] for c, c_v in row) % r for row in rows]

    def rmatvec(u):
        return [sum(v * u[i] for i, v in col) % r for col in cols_rows]

    for attempt in range(max_restarts):
        D = [rng.randrange(1, r) for _ in range(matrix.n_rows)]

        def Bv(v):
            t = matvec(v)
            return rmatvec([x * d % r for x, d in zip(t, D)])

        u = [rng.randrange(r) for _ in range(n)]
        b = Bv(u)
        dot = lambda a, bb: sum(x * y for x, y in zip(a, bb)) % r
        if not any(b):
            if any(u) and not any(matvec(u)):
                return u
            continue
        w_prev = bw_prev = None
        d_prev = None
        w = list(b)
        x = [0] * n
        ok = False
        for _ in range(2 * n + 64):
            bw = Bv(w)
            d = dot(w, bw)
            if d == 0:
                break
            di = pow(d, -1, r)
            proj = dot(w, b) * di % r
            x = [(xi + proj * wi) % r for xi, wi in zip(x, w)]
            c1 = dot(bw, bw) * di % r
            w_next = [(bwi - c1 * wi) % r for bwi, wi in zip(bw, w)]
            if w_prev is not None:
                c2 = dot(bw, bw_prev) * pow(d_prev, -1, r) % r
                w_next = [(wn - c2 * wp) % r for wn, wp in zip(w_next, w_prev)]
            w_prev, bw_prev, d_prev = w, bw, d
            w = w_next
            if not any(w):
                ok = Bv(x) == b
                break
        if not ok:
            continue
        v = [(xi - ui) % r for xi, ui in zip(x, u)]
        if any(v) and not any(matvec(v)):
            return v
    raise LanczosFailure(f"no kernel vector after {max_restarts} randomized restarts")
