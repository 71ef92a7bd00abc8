"""Factor bases, splitting sets, and polynomial-time relation generation.

Relations are multiplicative identities in K = F_{q^kn}: a sparse vector
of (factor-base index, exponent) pairs plus an exponent on the special
element h1(y) and a unit constant, with

    prod elem_i(x)^e_i * h1(y)^e_h * unit == 1    exactly in K.

Factor-base elements are monic irreducible polynomials over F_{q^k},
always canonicalized to the x side; an irreducible P appearing on the y
side enters as its coefficientwise q-th root with exponent multiplied
by q, since P(y) = (P^(1/q)(x))^q.

Degree-1 generation follows the splitting-set method: for triples
(a, b, c) making X^(q+1) + aX^q + bX + c split over F_{q^k} (distinct
roots), the identity

    x^(q+1) + a x^q + b x + c = [y h0(y) + a y h1(y) + b h0(y) + c h1(y)] / h1(y)

links linear elements in x to the degree-(d_h + 1) right side, which
splits with heuristic probability 1/(d_h+1)!.

For k = 1 the two-polynomial pencil route applies: for monic (F, G),
F(x)^q G(x) - F(x) G(x)^q is max(deg F, deg G)-smooth on the left by
construction, while its y-side numerator is guaranteed divisible by
M(Y) = h1(Y) Y - h0(Y); relations among all elements of degree <= d come
out whenever the remaining cofactor is d-smooth.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .algebra import (
    Poly,
    splits_completely,
    splits_into_linears,
    distinct_roots,
    smoothness_test,
    smooth_factor,
    irreducibles,
    is_irreducible,
)
from .algebra.fields import _mix
from .field_rep import FieldRep


# -- splitting sets ---------------------------------------------------------------


def bluher_set(field, q):
    """All B with X^(q+1) + BX + B split (distinct roots) over the field.

    The field is F_{q^k}; counts are (q^(k-1)-1)/(q^2-1) for odd k and
    (q^(k-1)-q)/(q^2-1) for even k.
    """
    out = []
    for B in field.elements():
        if B == 0:
            continue
        f = _bluher_poly(field, q, B)
        if splits_completely(f):
            out.append(B)
    return out


def bluher_count_formula(q, k):
    if k < 3:
        return 0 if k == 2 else None
    if k % 2:
        return (q ** (k - 1) - 1) // (q * q - 1)
    return (q ** (k - 1) - q) // (q * q - 1)


def _bluher_poly(field, q, B):
    coeffs = [B, B] + [0] * (q - 1) + [1]
    return Poly.from_coeffs(field, coeffs)


@dataclass
class SplittingSet:
    q: int
    k: int
    triples: tuple  # (a, b, c) over F_{q^k}

    def __len__(self):
        return len(self.triples)


def splitting_set(field, q, k) -> SplittingSet:
    """All (a, b, c) making X^(q+1) + aX^q + bX + c split with distinct roots.

    k = 2 is parameterized directly; k >= 3 goes through the Bluher set via
    B = (b - a^q)^(q+1) / (c - ab)^q, with the boundary families b = a^q and
    c = ab checked by direct splitting tests.
    """
    if field.order != q**k or k < 2:
        raise ValueError("field must be F_{q^k} with k >= 2")
    triples = []
    if k == 2:
        # (a, a^q, c) with c in F_q, c != a^(q+1)
        f_q_elems = field.subfield_elements(q)
        for a in field.elements():
            aq = field.pow(a, q)
            aq1 = field.mul(a, aq)
            for c in f_q_elems:
                if c != aq1:
                    triples.append((a, aq, c))
    else:
        L = bluher_set(field, q)
        qk1 = field.order - 1
        inv_exp = None
        for a in field.elements():
            aq = field.pow(a, q)
            for b in field.elements():
                if b == aq:
                    continue
                num = field.pow(field.add(b, aq), q + 1)  # (b - a^q)^(q+1), char 2
                ab = field.mul(a, b)
                for B in L:
                    # (c - ab)^q = num / B  ->  c = ab + (num/B)^(1/q)
                    t = field.mul(num, field.inv(B))
                    c = field.add(ab, field.root_q(t, q))
                    triples.append((a, b, c))
        # boundary: b = a^q, direct test over the c range
        for a in field.elements():
            aq = field.pow(a, q)
            for c in field.elements():
                f = _left_quartic(field, q, a, aq, c)
                if splits_completely(f):
                    triples.append((a, aq, c))
        # boundary: c = ab (never splits with distinct roots; kept as a check)
        # X^(q+1) + aX^q + bX + ab = (X^q + b)(X + a) has a root of
        # multiplicity q, so it contributes nothing under the distinct-root
        # convention.
    triples = sorted(set(triples))
    return SplittingSet(q=q, k=k, triples=tuple(triples))


def _left_quartic(field, q, a, b, c):
    """X^(q+1) + a X^q + b X + c over the field."""
    coeffs = [c, b] + [0] * (q - 2) + [a, 1] if q >= 2 else [c, field.add(a, b), 1]
    return Poly.from_coeffs(field, coeffs)


# -- factor base ----------------------------------------------------------------------


@dataclass
class FactorBase:
    rep: FieldRep
    max_degree: int
    elements: tuple = ()            # monic irreducible Polys, sorted by (deg, packed)
    index: dict = dc_field(default_factory=dict)
    # orbit structure (identity until orbit_reduce)
    orbit_rep: tuple = ()           # member index -> representative index
    orbit_exp: tuple = ()           # member index -> Frobenius step count j
    representatives: tuple = ()     # indices that are their own representative
    frob_j0: int = 0                # coefficient Frobenius power per step (0 = identity)
    frob_sn: int = 0                # true exponent: log(member) = p^(frob_sn * j) log(rep)

    @staticmethod
    def build(rep: FieldRep, max_degree: int) -> "FactorBase":
        field = rep.field
        els = []
        for d in range(1, max_degree + 1):
            els.extend(irreducibles(field, d))
        els.sort(key=lambda f: f.sort_key())
        fb = FactorBase(rep=rep, max_degree=max_degree, elements=tuple(els))
        fb.index = {f.packed: i for i, f in enumerate(els)}
        fb.orbit_rep = tuple(range(len(els)))
        fb.orbit_exp = tuple(0 for _ in els)
        fb.representatives = tuple(range(len(els)))
        return fb

    def __len__(self):
        return len(self.elements)

    @property
    def h1_index(self):
        """Virtual column index for the special element h1(y)."""
        return len(self.elements)

    def index_of(self, poly: Poly) -> int:
        return self.index[poly.packed]

    def contains(self, poly: Poly) -> bool:
        return poly.packed in self.index


def orbit_reduce(fb: FactorBase, rep: FieldRep) -> FactorBase:
    """Partition the base into Galois orbits of P -> P^(Frobenius^j0).

    When (h0, h1, I) are defined over F_{p^s}, the automorphism
    e -> e^(p^(s n)) of K fixes x and acts on factor-base polynomials by
    raising coefficients to the p^j0 power, j0 = s*n mod deg(F_{q^k}/F_p).
    log(member) = p^(s n j) * log(representative) mod r for a member j
    steps along its orbit.  A rep defined over the full F_{q^k} yields the
    identity partition.
    """
    field = rep.field
    s = rep.subfield_degree()
    j0 = (s * rep.n) % field.degree
    if j0 == 0 or s == field.degree:
        fb.frob_j0 = 0
        fb.frob_sn = 0
        fb.orbit_rep = tuple(range(len(fb.elements)))
        fb.orbit_exp = tuple(0 for _ in fb.elements)
        fb.representatives = tuple(range(len(fb.elements)))
        return fb
    n_el = len(fb.elements)
    orbit_rep = [-1] * n_el
    orbit_exp = [0] * n_el
    reps = []
    seen = [False] * n_el
    for i in range(n_el):
        if seen[i]:
            continue
        orbit = [i]
        cur = fb.elements[i]
        while True:
            cur = cur.frobenius_coeffs(j0)
            j = fb.index[cur.packed]
            if j == i:
                break
            orbit.append(j)
        pos_min = min(range(len(orbit)), key=lambda t: fb.elements[orbit[t]].sort_key())
        rep_idx = orbit[pos_min]
        reps.append(rep_idx)
        L = len(orbit)
        for t, j in enumerate(orbit):
            seen[j] = True
            orbit_rep[j] = rep_idx
            orbit_exp[j] = (t - pos_min) % L
    fb.frob_j0 = j0
    fb.frob_sn = s * rep.n
    fb.orbit_rep = tuple(orbit_rep)
    fb.orbit_exp = tuple(orbit_exp)
    fb.representatives = tuple(sorted(reps))
    return fb


def orbit_count_formula(p, coeff_degree, j0):
    """Number of orbits of a -> a^(p^j0) on F_{p^coeff_degree} (degree-1 base).

    An element of exact subfield degree d sits in an orbit of length
    d / gcd(j0, d); there are d * N_p(d) such elements.
    """
    from .algebra.density import irreducible_count

    total = 0
    for d in range(1, coeff_degree + 1):
        if coeff_degree % d:
            continue
        n_exact = irreducible_count(p, d) * d
        length = d // _gcd(j0, d)
        total += n_exact // length
    return total


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# -- relations -------------------------------------------------------------------------


@dataclass(frozen=True)
class Relation:
    entries: tuple          # ((index, exponent), ...) sorted by index
    h1_exp: int
    unit: int               # constant in F_{q^k}: prod * h1^e * unit == 1
    provenance: str

    def signature(self):
        return (self.entries, self.h1_exp)

    def to_line(self):
        ent = " ".join(f"{i}^{e}" for i, e in self.entries)
        return f"{ent} | h1^{self.h1_exp} | {self.unit} | prov={self.provenance}"

    @staticmethod
    def from_line(line):
        ent_s, h1_s, unit_s, prov_s = (part.strip() for part in line.split("|"))
        entries = []
        if ent_s:
            for tok in ent_s.split():
                i, _, e = tok.partition("^")
                entries.append((int(i), int(e)))
        return Relation(
            entries=tuple(entries),
            h1_exp=int(h1_s.split("^")[1]),
            unit=int(unit_s),
            provenance=prov_s.partition("=")[2],
        )


def write_relations(path, relations):
    with open(path, "w") as fh:
        for rel in relations:
            fh.write(rel.to_line() + "\n")


def read_relations(path):
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(Relation.from_line(line))
    return out


@dataclass
class RelGenStats:
    trials: int = 0
    successes: int = 0
    expected_rate: float = 0.0

    @property
    def rate(self):
        return self.successes / self.trials if self.trials else 0.0


def verify_relation(rep: FieldRep, fb: FactorBase, rel: Relation) -> bool:
    """Exact multiplicative check in K, no logarithms involved."""
    lhs = Poly.constant(rep.field, rel.unit)
    rhs = Poly.one(rep.field)
    for idx, e in rel.entries:
        base = fb.elements[idx]
        if e > 0:
            lhs = rep.mul(lhs, rep.pow(base, e))
        else:
            rhs = rep.mul(rhs, rep.pow(base, -e))
    if rel.h1_exp:
        h1y = rep.to_x(rep.h1)
        if rel.h1_exp > 0:
            lhs = rep.mul(lhs, rep.pow(h1y, rel.h1_exp))
        else:
            rhs = rep.mul(rhs, rep.pow(h1y, -rel.h1_exp))
    return lhs == rhs


def _merge(entries_dict, idx, e):
    entries_dict[idx] = entries_dict.get(idx, 0) + e
    if entries_dict[idx] == 0:
        del entries_dict[idx]


def y_factor_to_x(rep: FieldRep, P: Poly) -> Poly:
    """The x-side canonical form of a y-side irreducible: P(y) = P_hat(x)^q."""
    field = rep.field
    return P.map_coeffs(lambda c: field.root_q(c, rep.q))


def degree1_relations(rep: FieldRep, fb: FactorBase, sk: SplittingSet, budget=None,
                      sample_seed=None, want=None):
    """Relations between linear elements from the splitting-set identity."""
    field = rep.field
    h0, h1 = rep.h0, rep.h1
    triples = list(sk.triples)
    if sample_seed is not None:
        random.Random(_mix("deg1", sample_seed)).shuffle(triples)
    if budget is not None:
        triples = triples[:budget]
    out = []
    seen = set()
    stats = RelGenStats(expected_rate=1.0 / _factorial(rep.d_h + 1))
    x_of_y_root = {}
    for a, b, c in triples:
        stats.trials += 1
        num = (h0 + h1.scale(a)).shift(1) + h0.scale(b) + h1.scale(c)
        if num.is_zero:
            continue
        roots = splits_into_linears(num)
        if roots is None:
            continue
        stats.successes += 1
        entries = {}
        lhs = _left_quartic(field, rep.q, a, b, c)
        for rho in distinct_roots(lhs):
            _merge(entries, fb.index_of(Poly.from_coeffs(field, [rho, 1])), 1)
        for beta, mult in roots:
            root_x = x_of_y_root.get(beta)
            if root_x is None:
                root_x = field.root_q(beta, rep.q)
                x_of_y_root[beta] = root_x
            _merge(entries, fb.index_of(Poly.from_coeffs(field, [root_x, 1])), -rep.q * mult)
        unit = field.inv(num.lead())
        rel = Relation(
            entries=tuple(sorted(entries.items())),
            h1_exp=1,
            unit=unit,
            provenance=f"deg1(a={a},b={b},c={c})",
        )
        if rel.signature() in seen:
            continue
        seen.add(rel.signature())
        out.append(rel)
        if want is not None and len(out) >= want:
            break
    return out, stats


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _canonical_pairs(field, d):
    """Monic (F, G) pencil representatives: deg F = D > deg G = e, with the
    coefficient of X^e in F normalized to zero (kills F -> F + aG shifts).
    About q^(2d-2) pairs in total."""
    q = field.order
    for D in range(1, d + 1):
        for e in range(0, D):
            for gi in range(q**e):
                G = Poly.from_index(field, e, gi)
                for fi in range(q ** (D - 1)):
                    coeffs = []
                    v = fi
                    for pos in range(D):
                        if pos == e:
                            coeffs.append(0)
                            continue
                        coeffs.append(v % q)
                        v //= q
                    coeffs.append(1)
                    F = Poly.from_coeffs(field, coeffs)
                    yield F, G


def small_degree_relations_k1(rep: FieldRep, fb: FactorBase, d: int, budget=None,
                              want=None, verify_each=False):
    """k = 1 relations among elements of degree <= d from (F, G) pencils.

    The y-side numerator N = F(Y) G~(Y) h1^(deg F - deg G) - F~(Y) G(Y)
    (with F~ = sum f_i h0^i h1^(deg F - i)) is always divisible by
    M(Y) = h1(Y) Y - h0(Y); M(y) = h1(y) * prod_{alpha in F_q} (x - alpha)
    expands over the factor base, so only the cofactor N/M needs to be
    d-smooth.
    """
    if rep.k != 1:
        raise ValueError("pencil relations require k = 1")
    if d < 3:
        raise ValueError("need d >= 3 for a relation surplus")
    field = rep.field
    q = rep.q
    h0, h1 = rep.h0, rep.h1
    M = h1.shift(1) + h0
    # power tables h0^i * h1^(j) for the F~/G~ builds
    maxd = d
    h0p = [Poly.one(field)]
    h1p = [Poly.one(field)]
    for _ in range(maxd + 1):
        h0p.append(h0p[-1] * h0)
        h1p.append(h1p[-1] * h1)
    alphas = [Poly.from_coeffs(field, [alpha, 1]) for alpha in field.elements()]
    out = []
    seen = set()
    stats = RelGenStats()
    tried = 0
    for F, G in _canonical_pairs(field, d):
        tried += 1
        if budget is not None and tried > budget:
            break
        D, e = F.deg, G.deg
        Ft = Poly.zero(field)
        for i, fi in enumerate(F.coeffs()):
            if fi:
                Ft = Ft + (h0p[i] * h1p[D - i]).scale(fi)
        Gt = Poly.zero(field)
        for j, gj in enumerate(G.coeffs()):
            if gj:
                Gt = Gt + (h0p[j] * h1p[e - j]).scale(gj)
        N = F * Gt * h1p[D - e] + Ft * G
        stats.trials += 1
        if N.is_zero:
            continue
        C, Mrem = divmod(N, M)
        if not Mrem.is_zero:
            raise AssertionError("k=1 numerator not divisible by h1(Y)Y - h0(Y)")
        if C.deg > d and not smoothness_test(C, d):
            continue
        cfac = smooth_factor(C, d)
        if cfac is None:
            continue
        stats.successes += 1
        entries = {}
        for piece in [G] + [F + G.scale(alpha) for alpha in field.elements()]:
            if piece.deg <= 0:
                continue
            pf = smooth_factor(piece, d)
            for P, mult in pf.factors:
                _merge(entries, fb.index_of(P), mult)
        for alpha_poly in alphas:
            _merge(entries, fb.index_of(alpha_poly), -1)
        for P, mult in cfac.factors:
            _merge(entries, fb.index_of(P), -q * mult)
        unit = field.inv(cfac.unit)
        rel = Relation(
            entries=tuple(sorted(entries.items())),
            h1_exp=D - 1,
            unit=unit,
            provenance="k1(F=%s;G=%s)" % (",".join(map(str, F.coeffs())), ",".join(map(str, G.coeffs()))),
        )
        if not rel.entries and rel.h1_exp == 0:
            continue  # degenerate pair, e.g. (X, 1): both sides expand to the same product
        if rel.signature() in seen:
            continue
        if verify_each and not verify_relation(rep, fb, rel):
            raise AssertionError("pencil relation failed field verification")
        seen.add(rel.signature())
        out.append(rel)
        if want is not None and len(out) >= want:
            break
    return out, stats


def b2u_elements(field, u):
    """The irreducible X^2 + uX + v for the given u (empty for u = 0, char 2)."""
    if u == 0:
        return []
    out = []
    for v in field.elements():
        f = Poly.from_coeffs(field, [v, u, 1])
        if is_irreducible(f):
            out.append(f)
    return out


def degree2_systems(rep: FieldRep, fb: FactorBase, u, sk: SplittingSet, budget=None,
                    sample_seed=None, want=None):
    """Relations linking the degree-2 family X^2 + uX + v to linear elements.

    The left side X^(q+1) + aX^q + bX + c evaluated at Q = x^2 + ux factors
    into quadratics X^2 + uX + (root); the y-side numerator has degree
    2(d_h + 1) and must split into linears.
    """
    if rep.k < 2:
        raise ValueError("degree-2 systems require k >= 2")
    field = rep.field
    if u == 0:
        raise ValueError("u = 0 is inseparable in characteristic 2; skipped")
    h0, h1 = rep.h0, rep.h1
    uq = field.pow(u, rep.q)
    h0sq = h0 * h0
    h1sq = h1 * h1
    mixed = h0sq + (h0 * h1).scale(u)     # h0^2 + u h0 h1
    ysq_u = Poly.from_coeffs(field, [0, uq, 1])  # Y^2 + u^q Y
    triples = list(sk.triples)
    if sample_seed is not None:
        random.Random(_mix("deg2", sample_seed, u)).shuffle(triples)
    if budget is not None:
        triples = triples[:budget]
    out = []
    seen = set()
    stats = RelGenStats(expected_rate=1.0 / _factorial(2 * (rep.d_h + 1)))
    for a, b, c in triples:
        stats.trials += 1
        num = ysq_u * (mixed + h1sq.scale(a)) + mixed.scale(b) + h1sq.scale(c)
        if num.is_zero:
            continue
        roots = splits_into_linears(num)
        if roots is None:
            continue
        stats.successes += 1
        entries = {}
        quartic = _left_quartic(field, rep.q, a, b, c)
        ok = True
        for r_ in distinct_roots(quartic):
            quad = Poly.from_coeffs(field, [r_, u, 1])
            if quad.packed in fb.index:
                _merge(entries, fb.index[quad.packed], 1)
            else:
                lin = splits_into_linears(quad)
                if lin is None:
                    ok = False  # quadratic outside the base and irreducible
                    break
                for rho, mult in lin:
                    _merge(entries, fb.index_of(Poly.from_coeffs(field, [rho, 1])), mult)
        if not ok:
            continue
        for beta, mult in roots:
            root_x = field.root_q(beta, rep.q)
            _merge(entries, fb.index_of(Poly.from_coeffs(field, [root_x, 1])), -rep.q * mult)
        unit = field.inv(num.lead())
        rel = Relation(
            entries=tuple(sorted(entries.items())),
            h1_exp=2,
            unit=unit,
            provenance=f"deg2(u={u},a={a},b={b},c={c})",
        )
        if rel.signature() in seen:
            continue
        seen.add(rel.signature())
        out.append(rel)
        if want is not None and len(out) >= want:
            break
    return out, stats


def expand_h1(rep: FieldRep, fb: FactorBase):
    """h1(y) as factor-base entries: (entries, unit) with
    h1(y) = unit * prod elem^e, or None when h1 has a factor above the bound."""
    from .algebra import factor as _factor

    fac = _factor(rep.h1)
    entries = {}
    for P, mult in fac.factors:
        if P.deg > fb.max_degree:
            return None
        Phat = y_factor_to_x(rep, P)
        _merge(entries, fb.index_of(Phat), rep.q * mult)
    return tuple(sorted(entries.items())), fac.unit
