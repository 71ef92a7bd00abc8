"""Individual-logarithm machinery: descent trees over a field representation.

A target element is first split by a continued-fraction step into a smooth
numerator/denominator pair; each factor is then eliminated recursively,
rewriting it as a product of smaller-degree elements until everything lies
in the factor base.  Available eliminations:

  classical  degree-balanced special-Q descent through the rank-2 lattice
             of polynomial pairs forcing divisibility by Q, with the degree
             split steered by powers X^(2^a)
  bilinear   two-polynomial (F, G) systems: F^q G - F G^q is smooth on the
             left by construction, and asking Q | numerator(right side)
             gives F_q-linear conditions once G is fixed
  fly2       on-the-fly degree-2 elimination over F_{q^k} via the
             precomputed set of B with X^(q+1) + BX + B split, plus the
             type-1/type-2 recursive cascade
  trap       factors of h1(Y) c + h0(Y) resist bilinear elimination but
             satisfy log Q = log(x + c) - log R directly
  base       factor-base leaf (logarithm from the precomputation)

Every emitted edge set is an exact multiplicative identity in the field,
checkable with no logarithm knowledge; descent is deterministic given the
run seed.  The per-degree method schedule is data (a strategy table), not
code, so different (q, d_h) instances can re-derive their own graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .algebra import (
    Poly,
    factor,
    smooth_factor,
    smoothness_test,
    is_smooth_exact,
    splits_into_linears,
    distinct_roots,
    is_irreducible,
    poly_to_text,
    poly_from_text,
)
from .algebra.density import smooth_probability
from .algebra.fields import _mix
from .field_rep import FieldRep
from .relations import y_factor_to_x


class DescentError(Exception):
    def __init__(self, msg, tree=None):
        super().__init__(msg)
        self.tree = tree


class TrapDetected(Exception):
    def __init__(self, c):
        super().__init__(f"element divides h1*c + h0 for c = {c}")
        self.c = c


class BilinearInfeasible(Exception):
    def __init__(self, predicted):
        super().__init__(f"static bound predicts {predicted:.3g} expected solutions")
        self.predicted = predicted


class EliminationFailed(Exception):
    pass


# -- continued fraction split --------------------------------------------------------


@dataclass
class CFSplit:
    exponent: int
    num: Poly
    den: Poly
    num_factors: object
    den_factors: object
    trials: int


def half_gcd_split(rep: FieldRep, elem: Poly):
    """(num, den) of degree <= ceil(n/2) with num = den * elem mod I.

    Plain extended Euclid on (I, elem), stopped at the balance point; the
    invariant r_i = t_i * elem mod I holds at every step.
    """
    bound = (rep.n + 1) // 2
    r_prev, r_cur = rep.I, elem
    t_prev, t_cur = Poly.zero(rep.field), Poly.one(rep.field)
    while r_cur.deg > bound:
        q, r_next = divmod(r_prev, r_cur)
        t_next = t_prev + q * t_cur
        r_prev, r_cur = r_cur, r_next
        t_prev, t_cur = t_cur, t_next
    return r_cur, t_cur


def continued_fraction_split(rep: FieldRep, target: Poly, g: Poly, m: int,
                             budget: int, rng) -> CFSplit:
    """Randomize by g^e until both half-gcd sides are m-smooth."""
    if target.is_zero:
        raise ValueError("target must be nonzero")
    for trial in range(1, budget + 1):
        e = rng.randrange(rep.r if rep.r else rep.order - 1)
        shifted = rep.mul(target, rep.pow(g, e))
        num, den = half_gcd_split(rep, shifted)
        if num.is_zero or den.is_zero:
            continue
        if not smoothness_test(num, m) or not smoothness_test(den, m):
            continue
        nf = smooth_factor(num, m)
        df = smooth_factor(den, m)
        if nf is None or df is None:
            continue
        return CFSplit(exponent=e, num=num, den=den, num_factors=nf,
                       den_factors=df, trials=trial)
    raise DescentError(f"continued-fraction split failed after {budget} trials "
                       f"(smooth bound m = {m})")


# -- lattices --------------------------------------------------------------------------


@dataclass
class LatticeBasis:
    v1: tuple   # (w0, w1) Polys
    v2: tuple
    Q: Poly
    modulus_pair: tuple  # (A, B) with w0 A + w1 B = 0 mod Q
    degenerate: bool

    def norms(self):
        n1 = max(self.v1[0].deg, self.v1[1].deg)
        n2 = max(self.v2[0].deg, self.v2[1].deg)
        return n1, n2

    def determinant(self):
        return self.v1[0] * self.v2[1] + self.v1[1] * self.v2[0]

    def member(self, r_poly, s_poly):
        w0 = r_poly * self.v1[0] + s_poly * self.v2[0]
        w1 = r_poly * self.v1[1] + s_poly * self.v2[1]
        return w0, w1


def lattice_basis(Q: Poly, A: Poly, B: Poly) -> LatticeBasis:
    """Gaussian-reduced basis of {(w0, w1): w0 A + w1 B = 0 mod Q}.

    Q dividing a modulus component signals a trap to the caller.
    """
    field = Q.field
    if (B % Q).is_zero or (A % Q).is_zero:
        raise TrapDetected(None)
    # B invertible mod Q when gcd(B, Q) = 1; Q irreducible makes this the
    # only interesting case (the division above catches Q | B).
    g, binv = _invmod(B, Q)
    if g.deg != 0:
        raise TrapDetected(None)
    t = (A * binv) % Q
    v1 = (Poly.one(field), t)      # w0 = 1 -> w1 = -A/B = A/B (char 2)
    v2 = (Poly.zero(field), Q)
    v1, v2 = _gauss_reduce(v1, v2)
    n1 = max(v1[0].deg, v1[1].deg)
    n2 = max(v2[0].deg, v2[1].deg)
    degenerate = abs(n1 - n2) > 1
    if n1 > n2:
        v1, v2 = v2, v1
    return LatticeBasis(v1=v1, v2=v2, Q=Q, modulus_pair=(A, B), degenerate=degenerate)


def _invmod(a: Poly, m: Poly):
    """(gcd, inverse-of-a mod m) by extended Euclid."""
    field = a.field
    r0, r1 = m, a % m
    s0, s1 = Poly.zero(field), Poly.one(field)
    while not r1.is_zero:
        q, r2 = divmod(r0, r1)
        s2 = s0 + q * s1
        r0, r1, s0, s1 = r1, r2, s1, s2
    if r0.deg == 0:
        s0 = s0.scale(field.inv(r0[0]))
        r0 = r0.monic()
    return r0, s0 % m


def _norm(v):
    return max(v[0].deg, v[1].deg)


def _gauss_reduce(a, b):
    while True:
        if _norm(b) < _norm(a):
            a, b = b, a
        improved = False
        nb = _norm(b)
        for j in (0, 1):
            if b[j].deg != nb or a[j].is_zero or a[j].deg > b[j].deg:
                continue
            q = b[j] // a[j]
            cand = (b[0] + q * a[0], b[1] + q * a[1])
            if _norm(cand) < nb:
                b = cand
                improved = True
                break
        if not improved:
            return a, b


def fly2_lattice(rep: FieldRep, Q_y: Poly):
    """Normalized ((u0, Y+u1), (Y+v0, v1)) basis of w0 h0 + w1 h1 = 0 mod Q_y."""
    lb = lattice_basis(Q_y, rep.h0, rep.h1)
    vecs = [lb.v1, lb.v2]
    shaped = {}
    for w0, w1 in vecs:
        if w0.deg == 0 and w1.deg == 1:
            inv = rep.field.inv(w1.lead())
            shaped["u"] = (w0.scale(inv), w1.scale(inv))
        elif w0.deg == 1 and w1.deg <= 0:
            inv = rep.field.inv(w0.lead())
            shaped["v"] = (w0.scale(inv), w1.scale(inv))
    if "u" not in shaped or "v" not in shaped:
        return None, lb  # degenerate shape; caller falls back
    (u0p, yu1), (yv0, v1p) = shaped["u"], shaped["v"]
    u0, u1 = u0p[0], yu1[0]
    v0, v1 = yv0[0], v1p[0]
    return (u0, u1, v0, v1), lb


# -- descent nodes ----------------------------------------------------------------------


@dataclass
class DescentNode:
    poly: Poly               # x-side monic irreducible (or target for the root)
    level: str               # "base" field F_{q^k} vs "ext" F_{q^2k}
    degree: int
    method: str              # cf | classical | bilinear | fly2 | split | promote | trap | base | m_factor
    self_exp: int = 1        # the relation eliminates poly^self_exp
    children: list = dc_field(default_factory=list)   # (DescentNode, exponent)
    h1_exp: int = 0
    unit: int = 1
    status: str = "open"
    note: str = ""

    def leaf(self):
        return self.method == "base"


@dataclass
class DescentTree:
    rep: FieldRep
    target: Poly
    g: Poly
    cf_exponent: int = 0
    root_children: list = dc_field(default_factory=list)  # (node, exponent)
    log: int | None = None

    # -- serialization: line oriented, pre-order --------------------------------

    def to_file_text(self):
        lines = [
            f"target {poly_to_text(self.target)}",
            f"generator {poly_to_text(self.g)}",
            f"cf_exp {self.cf_exponent}",
            f"log {self.log if self.log is not None else '-'}",
        ]
        counter = [0]

        def emit(node, parent_id, exp):
            nid = counter[0]
            counter[0] += 1
            lines.append(
                f"{nid} {parent_id} {exp} {node.self_exp} {node.method} {node.level} "
                f"{node.degree} {node.h1_exp} {node.unit} {node.status} {poly_to_text(node.poly)}"
            )
            for child, ce in node.children:
                emit(child, nid, ce)

        for node, exp in self.root_children:
            emit(node, -1, exp)
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_file_text(rep: FieldRep, text: str) -> "DescentTree":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        kv = {}
        body = []
        for ln in lines:
            head = ln.split(None, 1)[0]
            if head in ("target", "generator", "cf_exp", "log"):
                kv[head] = ln.split(None, 1)[1]
            else:
                body.append(ln)
        tree = DescentTree(
            rep=rep,
            target=poly_from_text(rep.field, kv["target"]),
            g=poly_from_text(rep.field, kv["generator"]),
            cf_exponent=int(kv["cf_exp"]),
        )
        tree.log = None if kv["log"] == "-" else int(kv["log"])
        nodes = {}
        for ln in body:
            parts = ln.split(None, 10)
            nid, parent, exp, self_exp = int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3])
            method, level, degree, h1e, unit, status, ptext = (
                parts[4], parts[5], int(parts[6]), int(parts[7]), int(parts[8]), parts[9], parts[10])
            node = DescentNode(
                poly=poly_from_text(rep.field, ptext), level=level, degree=degree,
                method=method, self_exp=self_exp, h1_exp=h1e, unit=unit, status=status)
            nodes[nid] = node
            if parent < 0:
                tree.root_children.append((node, exp))
            else:
                nodes[parent].children.append((node, exp))
        return tree


# -- eliminations ------------------------------------------------------------------------


def q_side(rep: FieldRep, P: Poly) -> Poly:
    """The y-side polynomial with P(x)^q = Q_y(y): coefficientwise q-th power."""
    field = rep.field
    return P.map_coeffs(lambda c: field.pow(c, rep.q))


def detect_trap(rep: FieldRep, P: Poly):
    """c with P | h1*c + h0 (y-side), or None."""
    Q_y = q_side(rep, P)
    if (rep.h1 % Q_y).is_zero:
        return None  # h1 factor, handled separately
    g, h1inv = _invmod(rep.h1, Q_y)
    if g.deg != 0:
        return None
    t = (rep.h0 * h1inv) % Q_y
    if t.deg <= 0:
        return t[0]
    return None


def trap_resolve(rep: FieldRep, P: Poly):
    """Edges for log P via log(x + c) - log(R), R the cofactor of h1 c + h0.

    Returns (self_exp, [(poly, exp, tag)...], h1_exp, unit): the identity is
    P(y) R(y) = h1(y) (x + c), i.e. P(x)^q = h1(y) (x+c) / R(y).
    """
    c = detect_trap(rep, P)
    if c is None:
        raise EliminationFailed("not a trap: h0/h1 is nonconstant mod Q")
    field = rep.field
    Q_y = q_side(rep, P)
    target_poly = rep.h1.scale(c) + rep.h0
    R, rem = divmod(target_poly, Q_y)
    if not rem.is_zero:
        raise AssertionError("trap division failed")
    edges = [(Poly.from_coeffs(field, [c, 1]), 1, "linear")]
    unit = 1
    if R.deg > 0:
        rfac = factor(R)
        unit = field.mul(unit, rfac.unit)
        for fac_poly, mult in rfac.factors:
            edges.append((y_factor_to_x(rep, fac_poly), -rep.q * mult, "cofactor"))
    elif R.deg == 0:
        unit = field.mul(unit, R[0])
    # P^q * (R unit and factors) = h1 * (x+c)  ->  unit goes to the right side
    return rep.q, edges, 1, field.inv(unit) if unit else 1


def eq8_static(rep: FieldRep, d_F, d_G, d_Q, rho):
    """The feasibility heuristic q^((dF+dG+1-dQ)k - 3) > 1/rho, as a count."""
    expo = (d_F + d_G + 1 - d_Q) * rep.k - 3
    return (float(rep.q) ** expo) * rho


def bilinear_static_estimate(rep: FieldRep, d_F, d_G, d_Q):
    """Expected number of usable (F, G) solutions before smoothness.

    For fixed G the Q-divisibility gives d_Q F_q-linear conditions on the
    d_F + 1 F-coefficients, one kernel dimension being eaten by the trivial
    family F = c G; a useful second dimension appears with probability about
    q^-(d_Q - d_F + 1) per G when d_Q > d_F (k = 1, where the M-divisibility
    is free).  For k >= 2 the orbit-count heuristic
    q^((dF+dG+1-dQ)k - 3) stands in.
    """
    q, k = rep.q, rep.k
    if k == 1:
        n_g = sum(q**e for e in range(d_G + 1))
        if d_F > d_Q:
            return float(n_g)
        return n_g * float(q) ** (d_F - d_Q - 1)
    return float(q) ** ((d_F + d_G + 1 - d_Q) * k - 3)


class _SubfieldBasis:
    """F_q-coordinates inside F_{q^k} via F_2-linear algebra on packed bits."""

    def __init__(self, field, q):
        self.field = field
        self.q = q
        kappa = q.bit_length() - 1
        D = field.degree
        self.k = D // kappa
        self.kappa = kappa
        fq = field.subfield_elements(q)
        # F_2 basis of F_q
        fq_basis = []
        span = {0}
        for z in fq:
            if z not in span:
                fq_basis.append(z)
                span |= {s ^ z for s in span}
        w = field.generator()
        # w^t has degree k over F_q when w generates the multiplicative group
        self.ext_basis = [field.pow(w, t) for t in range(self.k)]
        cols = []
        for t in range(self.k):
            for b in fq_basis:
                cols.append(field.mul(self.ext_basis[t], b))
        # invert the F_2 matrix whose columns are cols (bit-packed rows)
        rows = []
        for i in range(D):
            row = 0
            for j, cval in enumerate(cols):
                if (cval >> i) & 1:
                    row |= 1 << j
            rows.append(row)
        inv = _bitmatrix_inverse(rows, D)
        if inv is None:
            raise AssertionError("subfield basis matrix is singular")
        self.inv_rows = inv
        self.fq_basis = fq_basis

    def coords(self, z):
        """z = sum_t phi_t * w^t with phi_t in F_q; returns the phi list."""
        bits = 0
        for i, row in enumerate(self.inv_rows):
            # bit i of the coordinate vector = parity of row & z
            if _parity(row & z):
                bits |= 1 << i
        out = []
        for t in range(self.k):
            phi = 0
            for s, b in enumerate(self.fq_basis):
                if (bits >> (t * self.kappa + s)) & 1:
                    phi ^= b
            out.append(phi)
        return out


def _parity(x):
    return bin(x).count("1") & 1


def _bitmatrix_inverse(rows, n):
    """Inverse of an n x n F_2 matrix given as bit-packed rows."""
    aug = [rows[i] | (1 << (n + i)) for i in range(n)]
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, n) if (aug[i] >> col) & 1), None)
        if piv is None:
            return None
        aug[r], aug[piv] = aug[piv], aug[r]
        for i in range(n):
            if i != r and (aug[i] >> col) & 1:
                aug[i] ^= aug[r]
        r += 1
    return [aug[i] >> n for i in range(n)]


def _fq_linsolve_kernel(columns, n_eq, field, fq_elems):
    """Kernel basis of a matrix over F_q given as columns (lists of F_q elems).

    Plain Gaussian elimination with F_q arithmetic through the ambient field.
    Returns a list of kernel basis vectors (tuples over F_q).
    """
    n_var = len(columns)
    # row-major matrix
    mat = [[columns[j][i] for j in range(n_var)] for i in range(n_eq)]
    pivots = []
    r = 0
    for c in range(n_var):
        piv = next((i for i in range(r, n_eq) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = field.inv(mat[r][c])
        mat[r] = [field.mul(inv, x) for x in mat[r]]
        for i in range(n_eq):
            if i != r and mat[i][c] != 0:
                coef = mat[i][c]
                mat[i] = [field.add(x, field.mul(coef, y)) for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == n_eq:
            break
    free = [c for c in range(n_var) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * n_var
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = mat[i][fc]  # char 2: x_p = sum coef * x_free
        basis.append(tuple(vec))
    return basis


def bilinear_elim(rep: FieldRep, P: Poly, d_F, d_G, max_child=None, budget=100000,
                  force=False, rho=None):
    """Rewrite P via an (F, G) pair with Q | numerator; left side is
    max(d_F, d_G)-smooth by construction.

    Returns (self_exp, edges, h1_exp, unit, info).  Raises TrapDetected for
    Remark-style traps, BilinearInfeasible when the static bound predicts no
    solutions (unless force), EliminationFailed when the search comes up dry.
    """
    field = rep.field
    q = rep.q
    d_Q = P.deg
    if d_F < d_G:
        raise ValueError("require d_F >= d_G")
    if d_F + d_G + 2 < d_Q:
        raise ValueError("need d_F + d_G + 2 >= d_Q")
    if max_child is None:
        max_child = d_Q - 1
    Q_y = q_side(rep, P)
    # special cases first
    c = detect_trap(rep, P)
    if c is not None:
        raise TrapDetected(c)
    if rep.k == 1:
        M = rep.h1.shift(1) + rep.h0
        if (M % Q_y).is_zero:
            return _m_factor_elim(rep, P, Q_y, M)
    if rho is None:
        cof_deg = max(d_F * (1 + rep.d_h) - d_Q, 0)
        rho = smooth_probability(field.order, cof_deg, max(max_child, 1))
    predicted = bilinear_static_estimate(rep, d_F, d_G, d_Q)
    info = {"eq8": eq8_static(rep, d_F, d_G, d_Q, rho), "predicted": predicted * rho}
    if predicted * rho < 0.05 and not force:
        raise BilinearInfeasible(predicted * rho)

    h0p = [Poly.one(field)]
    h1p = [Poly.one(field)]
    for _ in range(d_F + 1):
        h0p.append(h0p[-1] * rep.h0)
        h1p.append(h1p[-1] * rep.h1)

    M = rep.h1.shift(1) + rep.h0 if rep.k == 1 else None
    sb = _SubfieldBasis(field, q) if rep.k > 1 else None
    tried = 0
    for G in _g_stream(field, d_G):
        tried += 1
        if tried > budget:
            break
        e = G.deg
        Gq = G.frobenius_coeffs(_log2(q)) if rep.k > 1 else G
        Gt = Poly.zero(field)
        for j, gj in enumerate(G.coeffs()):
            if gj:
                Gt = Gt + (h0p[j] * h1p[e - j]).scale(gj)
        Gt_shift = Gt * h1p[d_F - e]
        # linear map: f-vector -> N mod Q_y
        if rep.k == 1:
            cols = []
            for i in range(d_F + 1):
                contrib = (Poly.monomial(field, 1, i) * Gt_shift + h0p[i] * h1p[d_F - i] * Gq) % Q_y
                cols.append([contrib[t] for t in range(d_Q)])
            kernel = _fq_linsolve_kernel(cols, d_Q, field, None)
            cand_fs = _kernel_candidates(kernel, field, d_F, limit=256)
        else:
            cols = []
            unknowns = []
            for i in range(d_F + 1):
                Yi_term = (Poly.monomial(field, 1, i) * Gt_shift) % Q_y
                Hi_term = (h0p[i] * h1p[d_F - i] * Gq) % Q_y
                for t in range(sb.k):
                    et = sb.ext_basis[t]
                    etq = field.pow(et, q)
                    contrib = (Yi_term.scale(etq) + Hi_term.scale(et)) % Q_y
                    col = []
                    for s in range(d_Q):
                        col.extend(sb.coords(contrib[s]))
                    cols.append(col)
                    unknowns.append((i, t))
            kernel = _fq_linsolve_kernel(cols, d_Q * sb.k, field, None)
            cand_fs = _kernel_candidates_k(kernel, sb, field, d_F, limit=256)
        for F in cand_fs:
            if F.is_zero or F.deg > d_F:
                continue
            # skip trivial solutions proportional to G
            if F.deg == G.deg:
                scaled = G.scale(field.div(F.lead(), G.lead()))
                if scaled == F:
                    continue
            Fq = F.frobenius_coeffs(_log2(q)) if rep.k > 1 else F
            Ft = Poly.zero(field)
            for i, fi in enumerate(F.coeffs()):
                if fi:
                    Ft = Ft + (h0p[i] * h1p[d_F - i]).scale(fi)
            N = Fq * Gt_shift + Ft * Gq
            if N.is_zero:
                continue
            C, remq = divmod(N, Q_y)
            if not remq.is_zero:
                continue
            if rep.k == 1:
                C, remm = divmod(C, M)
                if not remm.is_zero:
                    raise AssertionError("k=1 numerator lost its M divisor")
            if C.deg > 0 and not is_smooth_exact(C, max_child):
                continue
            cfac = smooth_factor(C, max_child) if C.deg > 0 else None
            # node^q = (u_P / u_C) * h1^(dF - [k=1]) * prod left * prod (x-a)^-1 * prod cof^-q
            edges = []
            unit = 1
            alphas = field.subfield_elements(q)
            for piece in [G] + [F + G.scale(alpha) for alpha in alphas]:
                if piece.deg == 0:
                    unit = field.mul(unit, piece[0])
                    continue
                if piece.deg < 0:
                    continue
                pf = factor(piece)
                unit = field.mul(unit, pf.unit)
                for fp, multp in pf.factors:
                    edges.append((fp, multp, "left"))
            h1_exp = d_F
            if rep.k == 1:
                h1_exp = d_F - 1
                for alpha in alphas:
                    edges.append((Poly.from_coeffs(field, [alpha, 1]), -1, "mexp"))
            if cfac is not None:
                unit_c = cfac.unit
                for fp, multp in cfac.factors:
                    edges.append((y_factor_to_x(rep, fp), -q * multp, "cof"))
            else:
                unit_c = C[0] if C.deg == 0 else 1
            info.update({"F": F, "G": G, "tried_G": tried})
            total_unit = field.div(unit, unit_c)
            return q, edges, h1_exp, total_unit, info
    raise EliminationFailed(f"bilinear search exhausted ({tried} G candidates)")


def _m_factor_elim(rep, P, Q_y, M):
    """P divides M(Y) = h1(Y)Y - h0(Y): expand M(y) = h1(y) prod (x - alpha)."""
    field = rep.field
    R, rem = divmod(M, Q_y)
    assert rem.is_zero
    edges = [(Poly.from_coeffs(field, [alpha, 1]), 1, "mexp")
             for alpha in field.subfield_elements(rep.q)]
    unit = 1
    if R.deg > 0:
        rfac = factor(R)
        unit = rfac.unit
        for fp, multp in rfac.factors:
            edges.append((y_factor_to_x(rep, fp), -rep.q * multp, "cof"))
    else:
        unit = R[0]
    # Q_y(y) R(y) = M(y) = h1(y) prod(x-alpha):  P^q = h1 prod(x-a) / (R unit)
    return rep.q, edges, 1, field.inv(unit), {"method": "m_factor"}


def _g_stream(field, d_G):
    for e in range(0, d_G + 1):
        for gi in range(field.order**e):
            yield Poly.from_index(field, e, gi)


def _kernel_candidates(kernel, field, d_F, limit):
    """Enumerate nonzero kernel combinations (k = 1: entries are F_q elems)."""
    out = []
    if not kernel:
        return out
    dim = len(kernel)
    count = 0
    # single basis vectors first, then pairs with scalar weights
    for vec in kernel:
        out.append(Poly.from_coeffs(field, list(vec)))
        count += 1
        if count >= limit:
            return out
    if dim >= 2:
        for i in range(dim):
            for j in range(i + 1, dim):
                for lam in field.elements():
                    if lam == 0:
                        continue
                    comb = tuple(field.add(a, field.mul(lam, b))
                                 for a, b in zip(kernel[i], kernel[j]))
                    out.append(Poly.from_coeffs(field, list(comb)))
                    count += 1
                    if count >= limit:
                        return out
    return out


def _kernel_candidates_k(kernel, sb, field, d_F, limit):
    out = []
    count = 0

    def to_poly(vec):
        coeffs = []
        for i in range(d_F + 1):
            z = 0
            for t in range(sb.k):
                phi = vec[i * sb.k + t]
                if phi:
                    z = field.add(z, field.mul(phi, sb.ext_basis[t]))
            coeffs.append(z)
        return Poly.from_coeffs(field, coeffs)

    for vec in kernel:
        out.append(to_poly(vec))
        count += 1
        if count >= limit:
            return out
    if len(kernel) >= 2:
        fq = field.subfield_elements(sb.q)
        for i in range(len(kernel)):
            for j in range(i + 1, len(kernel)):
                for lam in fq:
                    if lam == 0:
                        continue
                    comb = tuple(field.add(a, field.mul(lam, b))
                                 for a, b in zip(kernel[i], kernel[j]))
                    out.append(to_poly(comb))
                    count += 1
                    if count >= limit:
                        return out
    return out


def _log2(q):
    return q.bit_length() - 1


# -- classical (special-Q) step -----------------------------------------------------------


def classical_step(rep: FieldRep, P: Poly, m: int, a: int, orientation="v",
                   d_rs=1, budget=None, subfield_order=None, max_even=None):
    """Degree-balanced special-Q descent: rewrite P into factors of degree <= m.

    orientation "v" puts Q on the right side (divides R_v), "w" on the left.
    (r, s) multipliers of degree <= d_rs scan the lattice; both sides must be
    m-smooth (even-degree factors up to max_even allowed when set, to be
    split over the quadratic extension by the caller).
    """
    field = rep.field
    q = rep.q
    kappa = _log2(q)
    if not (0 <= a <= kappa):
        raise ValueError("a out of range")
    d_Q = P.deg
    two_a = 1 << a
    two_ka = 1 << (kappa - a)
    if orientation == "v":
        Q_y = q_side(rep, P)
        A = _pow_poly(rep.h1, two_a)
        B = _pow_poly(rep.h0, two_a)
        lb = lattice_basis(Q_y, A, B)   # (v0, v1): v0 h1^2a + v1 h0^2a = 0 mod Q
    elif orientation == "w":
        Xk = Poly.monomial(field, 1, two_ka)
        lb = lattice_basis(P, Poly.one(field), Xk % P if Xk.deg >= P.deg else Xk)
    else:
        raise ValueError("orientation must be 'v' or 'w'")
    stats = {"trials": 0, "l_smooth": 0}
    pool = (field.subfield_elements(subfield_order) if subfield_order
            else list(field.elements()))
    n1, n2 = lb.norms()
    for r_poly, s_poly in _rs_stream(field, d_rs, pool, n1, n2):
        if budget is not None and stats["trials"] >= budget:
            break
        w0, w1 = lb.member(r_poly, s_poly)
        if w0.is_zero and w1.is_zero:
            continue
        stats["trials"] += 1
        if orientation == "v":
            v0, v1 = w0, w1
            R_v = v1 * _pow_poly(rep.h0, two_a) + v0 * _pow_poly(rep.h1, two_a)
            if R_v.is_zero:
                continue
            Cr, remq = divmod(R_v, Q_y)
            if not remq.is_zero:
                continue
            Lv = _tilde(v1, two_ka).stretch(two_ka).shift(1) + _tilde(v0, two_ka).stretch(two_ka)
            if Lv.is_zero:
                continue
            sides = [(Cr, "y"), (Lv, "x")]
        else:
            wt0, wt1 = w0, w1
            L_w = wt1 * Poly.monomial(field, 1, two_ka) + wt0
            if L_w.is_zero:
                continue
            Cl, remq = divmod(L_w, P)
            if not remq.is_zero:
                continue
            w_0 = _tilde(wt0, two_a)
            w_1 = _tilde(wt1, two_a)
            d = max(w_0.deg, w_1.deg, 0)
            R_w = Poly.zero(field)
            h0a = _pow_poly(rep.h0, two_a)
            h1a = _pow_poly(rep.h1, two_a)
            h0p = [Poly.one(field)]
            h1p = [Poly.one(field)]
            for _ in range(d):
                h0p.append(h0p[-1] * h0a)
                h1p.append(h1p[-1] * h1a)
            t1 = Poly.zero(field)
            t0 = Poly.zero(field)
            for jj, cj in enumerate(w_1.coeffs()):
                if cj:
                    t1 = t1 + (h0p[jj] * h1p[d - jj]).scale(cj)
            for jj, cj in enumerate(w_0.coeffs()):
                if cj:
                    t0 = t0 + (h0p[jj] * h1p[d - jj]).scale(cj)
            R_w = t1.shift(1) + t0
            if R_w.is_zero:
                continue
            sides = [(Cl, "x"), (R_w, "y")]
        ok = True
        fax = []
        for poly_side, side_tag in sides:
            bound = max_even if (max_even and max_even > m) else m
            if poly_side.deg > bound and not smoothness_test(poly_side, bound):
                ok = False
                break
            f = smooth_factor(poly_side, bound)
            if f is None:
                ok = False
                break
            if bound > m and any(fp.deg > m and fp.deg % 2 for fp, _ in f.factors):
                ok = False  # only even degrees above m are splittable later
                break
            fax.append(f)
        if not ok:
            continue
        stats["l_smooth"] += 1
        edges = []
        if orientation == "v":
            # L_v(x)^{2^a} h1(y)^{2^a} = R_v(y) = node(x)^q * C(y)
            cf, lf = fax
            unit = field.div(_pow_elem(field, lf.unit, two_a), cf.unit)
            for fp, multp in lf.factors:
                edges.append((fp, two_a * multp, "left"))
            for fp, multp in cf.factors:
                edges.append((y_factor_to_x(rep, fp), -q * multp, "right"))
            return q, edges, two_a, unit, stats
        else:
            # (node C_l)(x)^{2^a} h1(y)^{2^a d} = R_w(y)
            cf, rf = fax
            d = max(w_0.deg, w_1.deg, 0)
            unit = field.div(rf.unit, _pow_elem(field, cf.unit, two_a))
            for fp, multp in cf.factors:
                edges.append((fp, -two_a * multp, "left-cof"))
            for fp, multp in rf.factors:
                edges.append((y_factor_to_x(rep, fp), q * multp, "right"))
            return two_a, edges, -two_a * d, unit, stats
    raise EliminationFailed(
        f"classical step exhausted: {stats['trials']} lattice points, m={m}, a={a}")


def _pow_poly(f: Poly, e: int) -> Poly:
    out = Poly.one(f.field)
    base = f
    while e:
        if e & 1:
            out = out * base
        base = base * base
        e >>= 1
    return out


def _pow_elem(field, c, e):
    return field.pow(c, e)


def _tilde(v: Poly, two_ka: int) -> Poly:
    """Coefficientwise power by two_ka (the inverse twist of the 2^a power)."""
    j = two_ka.bit_length() - 1
    return v.map_coeffs(lambda c: v.field.frobenius(c, j))


def _rs_stream(field, d_rs, pool, n1=0, n2=0):
    """(r, s) pairs up to a common scalar, ordered by the resulting member
    norm max(deg r + n1, deg s + n2).

    n1 <= n2 are the norms of the reduced basis vectors; letting r run
    n2 - n1 degrees further keeps members balanced even when the lattice
    basis itself is skewed.  r is monic (or zero with s monic); s takes all
    pool coefficients.
    """

    def monics(deg):
        for idx in range(len(pool) ** deg):
            coeffs = []
            v = idx
            for _ in range(deg):
                coeffs.append(pool[v % len(pool)])
                v //= len(pool)
            coeffs.append(1)
            yield Poly.from_coeffs(field, coeffs)

    zero = Poly.zero(field)
    for level in range(n2, n2 + d_rs + 1):
        rmax = level - n1
        smax = level - n2
        # r = 0: s monic of exact degree smax
        for s_poly in monics(smax):
            yield zero, s_poly
        # r of exact degree rmax with any s of degree <= smax (incl. 0)
        for r_poly in monics(rmax):
            yield r_poly, zero
            for sdeg in range(0, smax + 1):
                for s_monic in monics(sdeg):
                    for c in pool:
                        if c:
                            yield r_poly, s_monic.scale(c)
        # r of smaller degree with s of exact degree smax (level attained by s)
        for rdeg in range(0, rmax):
            for r_poly in monics(rdeg):
                for s_monic in monics(smax):
                    for c in pool:
                        if c:
                            yield r_poly, s_monic.scale(c)


# -- on-the-fly degree-2 elimination --------------------------------------------------------


def fly2_candidates(rep: FieldRep, P: Poly, bluher_B):
    """All (s, roots, cofactor) candidates for a degree-2 P over F_{q^k}.

    For each B with X^(q+1) + BX + B split, the s values solving
    B (u0 s^2 + (u1+v0) s + v1)^q = (s^q + u0 s + v0)^(q+1) make the quartic
    x^(q+1) + s x^q + (v0 + s u0) x + (v1 + s u1) split completely; the
    right side then reads node^q * C(y) / h1(y) with deg C <= d_h - 1.
    """
    field = rep.field
    q = rep.q
    if P.deg != 2:
        raise ValueError("fly2 eliminates degree-2 elements")
    Q_y = q_side(rep, P)
    shape, lb = fly2_lattice(rep, Q_y)
    if shape is None:
        raise EliminationFailed("degenerate fly2 lattice shape")
    u0, u1, v0, v1 = shape
    kq = _log2(q)
    out = []
    for B in bluher_B:
        # P_B(s) = N(s)^(q+1) + B D(s)^q,  N = s^q + u0 s + v0, D = u0 s^2 + (u1+v0)s + v1
        N = Poly.from_coeffs(field, [v0, u0] + [0] * (q - 2) + [1])
        D = Poly.from_coeffs(field, [v1, field.add(u1, v0), u0])
        Nq = N.frobenius_coeffs(kq).stretch(q)
        Dq = D.frobenius_coeffs(kq).stretch(q)
        PB = Nq * N + Dq.scale(B)
        if PB.is_zero:
            continue
        roots = _roots_in_field(PB)
        for s in roots:
            if N.evaluate(s) == 0 or D.evaluate(s) == 0:
                continue  # degenerate transform
            a, b, c = s, field.add(v0, field.mul(s, u0)), field.add(v1, field.mul(s, u1))
            quartic = Poly.from_coeffs(field, [c, b] + [0] * (q - 2) + [a, 1])
            lin = splits_into_linears(quartic)
            if lin is None:
                continue
            w0 = Poly.from_coeffs(field, [b, 1])          # Y + v0 + s u0
            w1 = Poly.from_coeffs(field, [c, a])          # s Y + v1 + s u1
            Rnum = w0 * rep.h0 + w1 * rep.h1
            C, rem = divmod(Rnum, Q_y)
            if not rem.is_zero:
                raise AssertionError("fly2 lattice member lost Q divisibility")
            out.append((B, s, lin, C))
    return out


def fly2_elim(rep: FieldRep, P: Poly, bluher_B, allow_recursive=True, allow_fallback=True):
    """Single-shot (1-smooth cofactor) if possible, else a type-1/type-2
    relation whose degree-2 right-side elements recurse; as a last resort
    the element is multiplied by a linear and the degree-3 product is
    eliminated by the two-polynomial method with degree <= 2 children."""
    field = rep.field
    q = rep.q
    try:
        cands = fly2_candidates(rep, P, bluher_B)
    except EliminationFailed:
        cands = []
        if not allow_fallback:
            raise
    best_recursive = None
    for B, s, lin, C in cands:
        cfac = splits_into_linears(C) if C.deg > 0 else []
        if cfac is not None:
            return _fly2_assemble(rep, P, lin, C, cfac, [])
        if not allow_recursive:
            continue
        fac = factor(C)
        degs = sorted(fp.deg for fp, mm in fac.factors for _ in range(mm))
        n2 = sum(1 for d in degs if d == 2)
        if all(d <= 2 for d in degs):
            typ = 1 if n2 == 1 else 2
            key = (typ, n2)
            if best_recursive is None or key < best_recursive[0]:
                best_recursive = (key, (P, lin, C, fac))
    if best_recursive is not None:
        P0, lin, C, fac = best_recursive[1]
        pairs = [(fp, mm) for fp, mm in fac.factors]
        return _fly2_assemble(rep, P0, lin, C, None, pairs, unit=fac.unit)
    if allow_fallback:
        # multiply by a linear and do a degree-3 elimination; (d_F, d_G) =
        # (1, 1) is structurally dead on the product (the degree-2 component
        # forces F proportional to G), so the scan runs at (2, 1)
        last = None
        for theta in field.elements():
            ell = Poly.from_coeffs(field, [theta, 1])
            Q3 = P * ell
            try:
                self_exp, edges, h1e, unit, info = bilinear_elim(
                    rep, Q3, 2, 1, max_child=2, budget=8200, force=True)
            except (EliminationFailed, BilinearInfeasible, TrapDetected) as exc:
                last = exc
                continue
            edges = list(edges) + [(ell, -self_exp, "linmul")]
            return self_exp, edges, h1e, unit, dict(info, fallback="times_linear_deg3")
        raise EliminationFailed(f"fly2 fallback exhausted: {last}")
    raise EliminationFailed(f"fly2: no usable candidate among {len(cands)}")


def _fly2_assemble(rep, P, lin_roots, C, c_linear, c_pairs, unit=None):
    """node^q = (1/u_C) h1(y) prod(x + rho) prod cof(x)^-q."""
    field = rep.field
    edges = []
    for rho, mult in lin_roots:
        edges.append((Poly.from_coeffs(field, [rho, 1]), mult, "left"))
    if c_linear is not None:
        u_C = C.lead() if C.deg > 0 else (C[0] if not C.is_zero else 1)
        for beta, mult in c_linear:
            root_x = field.root_q(beta, rep.q)
            edges.append((Poly.from_coeffs(field, [root_x, 1]), -rep.q * mult, "cof"))
    else:
        u_C = unit
        for fp, mult in c_pairs:
            edges.append((y_factor_to_x(rep, fp), -rep.q * mult, "cof"))
    return rep.q, edges, 1, field.inv(u_C) if u_C else 1, {}


def _roots_in_field(PB: Poly):
    """Roots of PB in its coefficient field, via gcd with X^|F| - X."""
    field = PB.field
    PB = PB.monic()
    pre = []
    if PB[0] == 0:
        pre.append(0)
        while PB[0] == 0 and PB.deg > 0:
            PB = PB // Poly.x(field)
    if PB.deg == 0:
        return pre
    ctx = PB.mod_context()
    h = ctx.pow_x_q(ctx.x_m, field.order)
    lin_part = PB.gcd(Poly(field, ctx.from_mont(h ^ ctx.x_m), -2)._fix_deg(PB.deg - 1))
    if lin_part.deg <= 0:
        return pre
    return sorted(pre + distinct_roots(lin_part))


# -- strategy table and orchestration ----------------------------------------------------


def default_strategy(rep: FieldRep, base_bound: int):
    """Per-degree ordered method lists with fallbacks, as data.

    Tuned for the k = 1 desk instances: bilinear chains below degree 8,
    degree-balanced classical steps above, continued fractions at the top.
    """
    methods = {}
    for d in range(1, base_bound + 1):
        methods[d] = [("base", {})]
    kappa = _log2(rep.q)
    if rep.k == 1:
        dh1 = rep.d_h + 1
        for d in range(base_bound + 1, 8):
            chain = []
            dF_min = max(-(-(d + dh1) // dh1), 2)  # keep the cofactor bound nonnegative
            for dF in range(dF_min, d):
                for bump in (1, 2):
                    dG = min(dF, max(1, d - dF + bump), 3)
                    spec = ("bilinear", {"d_F": dF, "d_G": dG})
                    if spec not in chain:
                        chain.append(spec)
            chain.append(("classical", {"a": max(kappa - 2, 0), "m": d - 1}))
            if d == base_bound + 1:
                # bottom-degree eliminations hit a structural wall for a
                # constant fraction of elements (the pencil condition
                # collapses to one bad eigenvalue problem mod Q); a wider
                # special-Q lattice scan always gets through
                chain.append(("classical", {"a": max(kappa - 2, 0), "m": d - 1, "d_rs": 2}))
            methods[d] = chain
        for d in range(max(8, base_bound + 1), 64):
            m_t = max(base_bound + 1, min(d - 2, (d * 2) // 3))
            methods[d] = [("classical", {"a": max(kappa - 2, 0), "m": m_t}),
                          ("classical", {"a": max(kappa - 2, 0), "m": min(d - 1, m_t + 2)}),
                          ("classical", {"a": max(kappa - 1, 0), "m": min(d - 1, m_t + 2)}),
                          ("classical", {"a": max(kappa - 2, 0), "m": min(d - 1, m_t + 2),
                                         "d_rs": 2})]
    else:
        for d in range(base_bound + 1, 64):
            dF = max(1, d - 1)
            methods[d] = [("bilinear", {"d_F": dF, "d_G": 1}),
                          ("bilinear", {"d_F": dF, "d_G": min(dF, 2)}),
                          ("classical", {"a": max(kappa - 2, 0), "m": d - 1})]
    return {
        "cf_bound": max(8, base_bound + 3),
        "cf_budget": 20000,
        "methods": methods,
        "max_escalation": 8,
        "classical_budget": 60000,
        "bilinear_budget": 8192,
    }


def descend(rep: FieldRep, target: Poly, g: Poly, logdb_lookup, base_bound: int,
            strategy=None, seed=0, verify_nodes=True) -> DescentTree:
    """Full descent: continued-fraction split, recursive elimination, tree.

    logdb_lookup(poly) returns the known log of a factor-base element (or
    raises KeyError).  The assembled log satisfies (g^c)^log = target^c.
    """
    if strategy is None:
        strategy = default_strategy(rep, base_bound)
    rng = random.Random(_mix("descend", seed, target.packed))
    tree = DescentTree(rep=rep, target=target, g=g)
    cf = continued_fraction_split(rep, target, g, strategy["cf_bound"],
                                  strategy["cf_budget"], rng)
    tree.cf_exponent = cf.exponent
    elim_cache = {}
    # target * g^e = num/den: log(target) = -e + sum num - sum den
    sign_parts = [(cf.num_factors, 1), (cf.den_factors, -1)]
    for fac, sgn in sign_parts:
        for fp, mult in fac.factors:
            node = _eliminate(rep, fp, strategy, elim_cache,
                              strategy["max_escalation"], verify_nodes, base_bound)
            tree.root_children.append((node, sgn * mult))
    return tree


def _eliminate(rep, P, strategy, cache, escalation, verify_nodes, base_bound):
    key = P.packed
    if key in cache:
        return _clone(cache[key])
    d = P.deg
    if d <= base_bound:
        node = DescentNode(poly=P, level="base", degree=d, method="base", status="done")
        cache[key] = node
        return node
    if escalation <= 0:
        raise DescentError(f"escalation budget exhausted at degree {d}")
    methods = strategy["methods"].get(d)
    if not methods:
        raise DescentError(f"no strategy entry for degree {d}")
    last_err = None
    for name, opts in methods:
        try:
            if name == "base":
                node = DescentNode(poly=P, level="base", degree=d, method="base", status="done")
                cache[key] = node
                return node
            if name == "bilinear":
                self_exp, edges, h1e, unit, _info = bilinear_elim(
                    rep, P, opts["d_F"], opts.get("d_G", 1),
                    max_child=opts.get("max_child"),
                    budget=strategy.get("bilinear_budget", 4096),
                    force=opts.get("force", False))
                method = "bilinear"
            elif name == "times_linear":
                self_exp, edges, h1e, unit = _times_linear_elim(
                    rep, P, opts, strategy, base_bound)
                method = "times_linear"
            elif name == "classical":
                self_exp, edges, h1e, unit, _stats = classical_step(
                    rep, P, opts["m"], opts["a"], opts.get("orientation", "v"),
                    d_rs=opts.get("d_rs", 1),
                    budget=strategy.get("classical_budget", 60000))
                method = "classical"
            elif name == "fly2":
                self_exp, edges, h1e, unit, _info = fly2_elim(
                    rep, P, opts["bluher"], allow_recursive=True)
                method = "fly2"
            elif name == "trap":
                self_exp, edges, h1e, unit = trap_resolve(rep, P)
                method = "trap"
            else:
                raise DescentError(f"unknown method {name}")
        except TrapDetected:
            try:
                self_exp, edges, h1e, unit = trap_resolve(rep, P)
                method = "trap"
            except EliminationFailed as exc:
                last_err = exc
                continue
        except (EliminationFailed, BilinearInfeasible, ValueError) as exc:
            last_err = exc
            continue
        node = DescentNode(poly=P, level="base", degree=d, method=method,
                           self_exp=self_exp, h1_exp=h1e, unit=unit, status="done")
        if verify_nodes and not _verify_node(rep, node, edges):
            raise DescentError(f"elimination identity failed for degree-{d} node ({method})")
        for child_poly, exp, _tag in edges:
            esc = escalation - 1 if child_poly.deg >= d else escalation
            child = _eliminate(rep, child_poly, strategy, cache, esc,
                               verify_nodes, base_bound)
            node.children.append((child, exp))
        cache[key] = node
        return _clone(node)
    raise DescentError(f"all methods failed for degree-{d} element: {last_err}")


def _times_linear_elim(rep, P, opts, strategy, base_bound):
    """Multiply a stuck element by a linear and eliminate one degree up.

    The product relation carries an extra (linear, -self_exp) edge so that
    the stuck element's own logarithm falls out; every other child stays at
    degree <= max(d_F, d_G) <= base_bound.
    """
    field = rep.field
    d_F = opts.get("d_F", base_bound)
    d_G = opts.get("d_G", base_bound)
    last = None
    for theta in field.elements():
        ell = Poly.from_coeffs(field, [theta, 1])
        Q2 = P * ell
        try:
            self_exp, edges, h1e, unit, _inf = bilinear_elim(
                rep, Q2, d_F, d_G, max_child=base_bound,
                budget=strategy.get("bilinear_budget", 8192), force=True)
        except (EliminationFailed, BilinearInfeasible, TrapDetected) as exc:
            last = exc
            continue
        edges = list(edges) + [(ell, -self_exp, "linmul")]
        return self_exp, edges, h1e, unit
    raise EliminationFailed(f"times-linear fallback exhausted: {last}")


def _clone(node):
    # nodes are shared DAG-style through the cache; the tree serializer
    # walks them recursively, so sharing is safe (read-only after build)
    return node


def _verify_node(rep, node, edges):
    """node^self_exp == unit * h1(y)^h1_exp * prod child^exp, exactly in K."""
    field = rep.field
    lhs = rep.pow(node.poly, node.self_exp)
    pos = Poly.constant(field, node.unit)
    neg = Poly.one(field)
    h1y = rep.to_x(rep.h1)
    if node.h1_exp > 0:
        pos = rep.mul(pos, rep.pow(h1y, node.h1_exp))
    elif node.h1_exp < 0:
        neg = rep.mul(neg, rep.pow(h1y, -node.h1_exp))
    for child_poly, exp, _tag in edges:
        if exp > 0:
            pos = rep.mul(pos, rep.pow(child_poly, exp))
        else:
            neg = rep.mul(neg, rep.pow(child_poly, -exp))
    return rep.mul(lhs, neg) == pos


def assemble_log(tree: DescentTree, rep: FieldRep, logdb_lookup) -> int:
    """Signed exponent-weighted leaf sum, with the continued-fraction
    correction, reduced mod r."""
    r = rep.r
    h1_log = _h1_log(rep, logdb_lookup)
    memo = {}

    def node_log(node):
        key = node.poly.packed
        if key in memo:
            return memo[key]
        if node.method == "base":
            val = logdb_lookup(node.poly)
        else:
            acc = (node.h1_exp * h1_log) % r
            for child, exp in node.children:
                acc = (acc + exp * node_log(child)) % r
            val = acc * pow(node.self_exp, -1, r) % r
        memo[key] = val
        return val

    total = (-tree.cf_exponent) % r
    for node, exp in tree.root_children:
        total = (total + exp * node_log(node)) % r
    tree.log = total
    return total


def _h1_log(rep: FieldRep, logdb_lookup) -> int:
    """log of h1(y) from base logs (h1 factors always sit below the bound
    in desk instances; units vanish mod r)."""
    from .algebra import factor as _factor

    r = rep.r
    fac = _factor(rep.h1)
    acc = 0
    for fp, mult in fac.factors:
        acc = (acc + rep.q * mult * logdb_lookup(y_factor_to_x(rep, fp))) % r
    return acc
