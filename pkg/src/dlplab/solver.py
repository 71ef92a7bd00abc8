"""Pipeline orchestration, verification bundles, and the brute-force oracle.

solve() drives representation -> relations -> linear algebra -> descent and
refuses to report a logarithm that does not pass verify().  oracle_dlog is
an independent Pohlig-Hellman implementation (baby-step giant-step below
2^32 per prime, Pollard rho above) used to cross-check pipeline answers on
desk-sized subgroups.

The module also rebuilds the published 4404-bit verification instance: the
tower F_{2^12} = F_2[U]/(U^12+U^3+1) extended by the degree-367 factor of
h1(X^64) X + h0(X^64), the generator x + u^7, the pi-bit target element,
and the recorded 210-digit logarithm, checked exactly.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field as dc_field

from .algebra import (
    Poly,
    factor,
    poly_to_text,
    poly_from_text,
)
from .algebra.fields import field_desc, _mix
from .field_rep import (
    FieldRep,
    find_representation,
    verify_representation,
    discover_subgroup_order,
    factor_integer,
    rep_defining_poly,
)
from .relations import (
    FactorBase,
    orbit_reduce,
    small_degree_relations_k1,
    degree1_relations,
    splitting_set,
    verify_relation,
    write_relations,
    read_relations,
)
from .linalg import build_matrix, lanczos_solve, LogDatabase, SparseMatrix
from .descent import descend, assemble_log, default_strategy, DescentTree


# -- pi bits ---------------------------------------------------------------------------


def _atan_inv_scaled(x, prec_bits):
    """floor(2^prec * arctan(1/x)) by the alternating series (integer only)."""
    one = 1 << prec_bits
    term = one // x
    total = term
    xsq = x * x
    k = 1
    while term:
        term //= xsq
        if term == 0:
            break
        total += -(term // (2 * k + 1)) if k % 2 else term // (2 * k + 1)
        k += 1
    return total


def pi_scaled(prec_bits, formula="machin"):
    """floor(pi * 2^prec_bits), with two independent arctan formulas."""
    guard = 64
    p = prec_bits + guard
    if formula == "machin":
        val = 16 * _atan_inv_scaled(5, p) - 4 * _atan_inv_scaled(239, p)
    elif formula == "stormer":
        val = (24 * _atan_inv_scaled(8, p) + 8 * _atan_inv_scaled(57, p)
               + 4 * _atan_inv_scaled(239, p))
    else:
        raise ValueError("unknown formula")
    return val >> guard

# First 64 fractional bits of pi, as a pinned self-test constant.
PI_FRAC64 = 0x243F6A8885A308D3


def pi_fraction_bits(count):
    """The first `count` fractional bits of pi, most significant first."""
    m = pi_scaled(count + 8)
    frac = m - 3 * (1 << (count + 8))
    out = [(frac >> (count + 8 - 1 - i)) & 1 for i in range(count)]
    head = int("".join(str(b) for b in out[:64]), 2)
    if count >= 64 and head != PI_FRAC64:
        raise AssertionError("pi bit self-test failed")
    alt = pi_scaled(80, formula="stormer")
    alt_frac = alt - 3 * (1 << 80)
    if (alt_frac >> (80 - 64)) != PI_FRAC64:
        raise AssertionError("independent pi formula disagrees")
    return out


# -- the published 4404-bit verification instance ----------------------------------------

PUBLISHED_LOG_4404 = int(
    "40932089202142351640934477339007025637256140979451423541922853874473604390153516847214082336876"
    "89563902511062230980145272871017382542826764695598431147678955454757957664758487542272115947611"
    "82312814017076893242"
)

R2_FACTOR_SMALL = 13 * 7170258097


def r2_subgroup_order():
    return (2**734 + 2**551 + 2**367 + 2**184 + 1) // R2_FACTOR_SMALL


def r1_subgroup_order():
    return (2**1223 + 2**612 + 1) // 5


@dataclass
class VerificationBundle:
    field: object      # coefficient tower
    modulus: Poly      # irreducible extension polynomial (degree n over the tower)
    generator: Poly
    target: Poly
    subgroup_order: int
    cofactor: int
    claimed_log: int

    def to_file_text(self):
        lines = [
            f"p {self.field.p}",
            "tower " + ";".join(
                f"{d}:" + ",".join(str(c) for c in coeffs) for d, coeffs in self.field.levels),
            f"modulus {poly_to_text(self.modulus)}",
            f"generator {poly_to_text(self.generator)}",
            f"target {poly_to_text(self.target)}",
            f"r {self.subgroup_order}",
            f"cofactor {self.cofactor}",
            f"log {self.claimed_log}",
        ]
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_file_text(text):
        kv = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition(" ")
            kv[key] = val.strip()
        fld = field_desc(int(kv["p"]), [
            (int(part.partition(":")[0]),
             tuple(int(c) for c in part.partition(":")[2].split(",")))
            for part in kv["tower"].split(";")
        ])
        target = kv["target"]
        modulus = poly_from_text(fld, kv["modulus"])
        if target == "pi":
            tpoly = pi_target(fld, modulus.deg)
        else:
            tpoly = poly_from_text(fld, target)
        return VerificationBundle(
            field=fld,
            modulus=modulus,
            generator=poly_from_text(fld, kv["generator"]),
            target=tpoly,
            subgroup_order=int(kv["r"]),
            cofactor=int(kv["cofactor"]),
            claimed_log=int(kv["log"]),
        )


def pi_target(field, n):
    """sum_i bit_i * u^(11 - i mod 12) * x^(i div 12) over all i < 12 n."""
    total_bits = field.degree * n
    bits = pi_fraction_bits(total_bits)
    d = field.degree
    u = 2  # the class of the tower generator at the top level
    coeffs = [0] * n
    for i, b in enumerate(bits):
        if b:
            coeffs[i // d] = field.add(coeffs[i // d], field.pow(u, (d - 1) - (i % d)))
    return Poly.from_coeffs(field, coeffs)


def verify(bundle: VerificationBundle) -> bool:
    """(g^cofactor)^log == target^cofactor, exactly in the declared field."""
    if bundle.modulus.deg < 1:
        raise ValueError("malformed bundle: trivial modulus")
    from .algebra.packed import packed_field, PackedModulus

    ctx = PackedModulus(packed_field(bundle.field), bundle.modulus.packed, bundle.modulus.deg)
    gm = ctx.to_mont(bundle.generator.packed)
    gbar = ctx.pow_mont(gm, bundle.cofactor)
    lhs = ctx.pow_mont(gbar, bundle.claimed_log)
    tm = ctx.to_mont(bundle.target.packed)
    rhs = ctx.pow_mont(tm, bundle.cofactor)
    return lhs == rhs


def build_published_bundle():
    """The full 4404-bit reproduction: field, generator, pi target, log."""
    F12 = field_desc(2, [(12, (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1))])  # U^12+U^3+1
    h1 = Poly.from_coeffs(F12, [1, 1, 0, 1, 0, 1])           # X^5+X^3+X+1
    h0 = Poly.from_coeffs(F12, [1, 1, 1, 0, 1, 0, 1])        # X^6+X^4+X^2+X+1
    T = rep_defining_poly(F12, 64, h0, h1)
    fac = factor(T)
    degs = sorted(g.deg for g, _ in fac.factors)
    if degs != [17, 367]:
        raise AssertionError(f"defining polynomial split unexpectedly: {degs}")
    temp2 = [g for g, _ in fac.factors if g.deg == 17][0]
    polyx = [g for g, _ in fac.factors if g.deg == 367][0]
    r2 = r2_subgroup_order()
    cofactor = (2**4404 - 1) // r2
    u7 = F12.pow(2, 7)
    g = Poly.from_coeffs(F12, [u7, 1])
    bundle = VerificationBundle(
        field=F12, modulus=polyx, generator=g, target=pi_target(F12, 367),
        subgroup_order=r2, cofactor=cofactor, claimed_log=PUBLISHED_LOG_4404)
    return bundle, temp2, h0, h1, T


# -- oracle -------------------------------------------------------------------------------

ORACLE_PRIME_BOUND = 1 << 48


def oracle_dlog(rep: FieldRep, g: Poly, target: Poly, order: int,
                order_factorization=None, seed=0):
    """Discrete log of target base g in the cyclic group of the given order,
    by Pohlig-Hellman with BSGS below 2^32 and Pollard rho above."""
    if order_factorization is None:
        order_factorization = factor_integer(order)
    if max(order_factorization) > ORACLE_PRIME_BOUND:
        raise ValueError("oracle refuses: largest prime factor above the desk bound 2^48")
    residues = []
    moduli = []
    for p, e in sorted(order_factorization.items()):
        pe = p**e
        g_i = rep.pow(g, order // pe)
        t_i = rep.pow(target, order // pe)
        x = 0
        gamma = rep.pow(g_i, pe // p)  # order p
        for j in range(e):
            exp = order_adjust = pe // (p ** (j + 1))
            h_j = rep.pow(rep.mul(t_i, rep.inv_elem(rep.pow(g_i, x))), exp)
            if rep.is_one(h_j):
                d = 0
            elif p < (1 << 32):
                d = _bsgs(rep, gamma, h_j, p)
            else:
                d = _rho_dlog(rep, gamma, h_j, p, seed)
            x += d * (p**j)
        residues.append(x % pe)
        moduli.append(pe)
    return _crt(residues, moduli)


def _bsgs(rep, g, h, order):
    m = int(order**0.5) + 1
    table = {}
    cur = Poly.one(rep.field)
    for j in range(m):
        table.setdefault(cur.packed, j)
        cur = rep.mul(cur, g)
    # cur = g^m; giant steps with g^{-m}
    g_inv_m = rep.inv_elem(cur)
    y = h
    for i in range(m + 1):
        j = table.get(y.packed)
        if j is not None:
            return (i * m + j) % order
        y = rep.mul(y, g_inv_m)
    raise ArithmeticError("BSGS failed: element outside the subgroup?")


def _rho_dlog(rep, g, h, order, seed):
    rng = random.Random(_mix("rho-dlog", seed, order))
    for attempt in range(24):
        a0, b0 = rng.randrange(order), rng.randrange(order)
        x = rep.mul(rep.pow(g, a0), rep.pow(h, b0))
        a1, b1 = a0, b0

        def step(z, a, b):
            sel = z.packed % 3
            if sel == 0:
                return rep.mul(z, g), (a + 1) % order, b
            if sel == 1:
                return rep.mul(z, z), (2 * a) % order, (2 * b) % order
            return rep.mul(z, h), a, (b + 1) % order

        y, ya, yb = step(x, a1, b1)
        z, za, zb = step(y, ya, yb)
        while y.packed != z.packed:
            y, ya, yb = step(y, ya, yb)
            z, za, zb = step(z, za, zb)
            z, za, zb = step(z, za, zb)
        db = (yb - zb) % order
        if db == 0:
            continue
        return (za - ya) * pow(db, -1, order) % order
    raise ArithmeticError("rho failed repeatedly; group order may be wrong")


def _crt(residues, moduli):
    x = 0
    m_all = 1
    for m in moduli:
        m_all *= m
    for res, m in zip(residues, moduli):
        n_i = m_all // m
        x = (x + res * n_i * pow(n_i, -1, m)) % m_all
    return x


# -- run configuration ---------------------------------------------------------------------


@dataclass
class RunConfig:
    values: dict = dc_field(default_factory=dict)

    @staticmethod
    def load(path):
        cfg = RunConfig()
        cfg._load_into(path)
        return cfg

    def _load_into(self, path):
        base = os.path.dirname(os.path.abspath(path))
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if line.startswith("include "):
                    self._load_into(os.path.join(base, line.split(None, 1)[1]))
                    continue
                key, _, val = line.partition("=")
                self.values[key.strip()] = val.strip()

    @staticmethod
    def from_text(text):
        cfg = RunConfig()
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            cfg.values[key.strip()] = val.strip()
        return cfg

    def to_text(self):
        return "\n".join(f"{k}={v}" for k, v in sorted(self.values.items())) + "\n"

    def get(self, key, default=None, cast=str):
        if key not in self.values:
            return default
        return cast(self.values[key])


# -- pipeline --------------------------------------------------------------------------------


@dataclass
class SolveResult:
    rep: FieldRep
    fb: FactorBase
    logdb: LogDatabase
    g: Poly
    targets: list        # (target Poly, log int, DescentTree)
    report: dict


class PipelineError(Exception):
    pass


def _stage_path(outdir, name):
    return os.path.join(outdir, name) if outdir else None


def _atomic_write(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def pick_generator(rep: FieldRep, fb: FactorBase):
    """The first linear element x + theta whose cofactor power is nontrivial."""
    field = rep.field
    for theta in field.elements():
        g = Poly.from_coeffs(field, [theta, 1])
        gc = rep.pow(g, rep.c)
        if not rep.is_one(gc) and not gc.is_zero:
            return g
    raise PipelineError("no linear generator found with nontrivial subgroup image")


def solve_factor_base_logs(rep: FieldRep, fb: FactorBase, relations, g: Poly,
                           seed=0, h1_mode="auto", spot_checks=20):
    """Kernel vector of the relation matrix, normalized to log(g) = 1."""
    r = rep.r
    matrix, col_of, h1_col = build_matrix(relations, fb, rep, h1_mode=h1_mode)
    if matrix.n_rows < matrix.n_cols:
        raise PipelineError(
            f"relation deficit: {matrix.n_rows} rows < {matrix.n_cols} columns")
    v = lanczos_solve(matrix, r, seed=seed)
    g_idx = fb.index_of(g)
    g_col = col_of[fb.orbit_rep[g_idx]]
    g_mult = pow(rep.field.p, fb.frob_sn * fb.orbit_exp[g_idx], r) if fb.frob_sn else 1
    g_log_raw = g_mult * v[g_col] % r
    if g_log_raw == 0:
        raise PipelineError("kernel vector vanishes on the generator column; rerun with another seed")
    scale = pow(g_log_raw, -1, r)
    logdb = LogDatabase(r=r)
    for ridx, col in col_of.items():
        logdb.set(ridx, v[col] * scale % r, "linalg")
    rng = random.Random(_mix("spot", seed))
    gbar = rep.pow(g, rep.c)
    for _ in range(spot_checks):
        idx = rng.choice(fb.representatives)
        val = logdb.get(idx)
        elem = fb.elements[idx]
        if rep.pow(elem, rep.c) != rep.pow(gbar, val):
            raise PipelineError(
                "factor-base log spot check failed; matrix rank was insufficient")
    return logdb


def logdb_lookup_fn(rep: FieldRep, fb: FactorBase, logdb: LogDatabase):
    r = rep.r
    p = rep.field.p

    def lookup(poly: Poly) -> int:
        idx = fb.index_of(poly)
        ridx = fb.orbit_rep[idx]
        base_log = logdb.get(ridx)
        if base_log is None:
            raise KeyError(f"no log for factor-base element {poly}")
        j = fb.orbit_exp[idx]
        if fb.frob_sn and j:
            return pow(p, fb.frob_sn * j, r) * base_log % r
        return base_log

    return lookup


def solve(config: RunConfig, progress=lambda *a: None) -> SolveResult:
    """End-to-end pipeline with stage persistence and resume."""
    seed = config.get("seed", 0, int)
    outdir = config.get("outdir")
    if outdir:
        os.makedirs(outdir, exist_ok=True)
    report = {}

    # stage 1: representation
    rep_file = _stage_path(outdir, "rep.txt")
    if rep_file and os.path.exists(rep_file):
        rep = FieldRep.from_file_text(open(rep_file).read())
        progress("rep", "loaded")
    else:
        rep = _rep_from_config(config)
        if rep_file:
            _atomic_write(rep_file, rep.to_file_text())
        progress("rep", "built")
    ok, diags = verify_representation(rep)
    if not ok:
        raise PipelineError(f"representation invalid: {diags}")
    report["rep"] = {"q": rep.q, "k": rep.k, "n": rep.n, "d_h": rep.d_h, "r": rep.r}

    base_bound = config.get("base_bound", 3, int)
    fb = FactorBase.build(rep, base_bound)
    orbit_reduce(fb, rep)
    report["factor_base"] = {"elements": len(fb), "representatives": len(fb.representatives)}

    g = pick_generator(rep, fb)
    report["generator"] = poly_to_text(g)

    # stage 2: relations
    rel_file = _stage_path(outdir, "relations.txt")
    if rel_file and os.path.exists(rel_file):
        relations = read_relations(rel_file)
        progress("relations", f"loaded {len(relations)}")
    else:
        want = int(len(fb.representatives) * config.get("surplus", 1.25, float)) + 32
        if rep.k == 1:
            relations, stats = small_degree_relations_k1(
                rep, fb, base_bound, budget=config.get("relation_budget", 500000, int),
                want=want)
        else:
            sk = splitting_set(rep.field, rep.q, rep.k)
            relations, stats = degree1_relations(
                rep, fb, sk, budget=config.get("relation_budget", 500000, int), want=want)
        report["relations"] = {"count": len(relations), "trials": stats.trials,
                               "rate": stats.rate}
        if len(relations) < len(fb.representatives):
            raise PipelineError(
                f"relation generation fell short: {len(relations)} < {len(fb.representatives)}")
        sample = random.Random(_mix("relver", seed)).sample(
            relations, min(len(relations), config.get("verify_sample", len(relations), int)))
        for rel in sample:
            if not verify_relation(rep, fb, rel):
                raise PipelineError(f"relation failed verification: {rel.to_line()}")
        if rel_file:
            write_relations(rel_file, relations)
        progress("relations", f"built {len(relations)}")

    # stage 3: linear algebra
    logdb_file = _stage_path(outdir, "logdb.txt")
    if logdb_file and os.path.exists(logdb_file):
        logdb = LogDatabase.from_file_text(open(logdb_file).read())
        progress("linalg", "loaded")
    else:
        logdb = solve_factor_base_logs(rep, fb, relations, g, seed=seed,
                                       h1_mode=config.get("h1_mode", "auto"))
        if logdb_file:
            _atomic_write(logdb_file, logdb.to_file_text())
        progress("linalg", f"solved {len(logdb)} logs")
    report["logs"] = len(logdb)

    # stage 4: descent on targets
    lookup = logdb_lookup_fn(rep, fb, logdb)
    strategy = default_strategy(rep, base_bound)
    targets = _targets_from_config(config, rep, seed)
    out = []
    gbar = rep.pow(g, rep.c)
    for i, target in enumerate(targets):
        tree = descend(rep, target, g, lookup, base_bound, strategy=strategy,
                       seed=seed + i)
        log_val = assemble_log(tree, rep, lookup)
        if rep.pow(target, rep.c) != rep.pow(gbar, log_val):
            raise PipelineError("descent produced an unverifiable logarithm")
        out.append((target, log_val, tree))
        if outdir:
            _atomic_write(os.path.join(outdir, f"tree_{i}.txt"), tree.to_file_text())
        progress("descent", f"target {i} -> {log_val}")
    report["targets"] = [(poly_to_text(t), lg) for t, lg, _ in out]
    if outdir:
        _atomic_write(os.path.join(outdir, "report.txt"), _report_text(report))
    return SolveResult(rep=rep, fb=fb, logdb=logdb, g=g, targets=out, report=report)


def _rep_from_config(config: RunConfig):
    if config.get("rep_file"):
        return FieldRep.from_file_text(open(config.get("rep_file")).read())
    q = config.get("q", None, int)
    k = config.get("k", 1, int)
    n = config.get("n", None, int)
    d_h = config.get("d_h", None, int)
    tower = config.get("tower")
    if tower:
        levels = [(int(part.partition(":")[0]),
                   tuple(int(c) for c in part.partition(":")[2].split(",")))
                  for part in tower.split(";")]
        field = field_desc(config.get("p", 2, int), levels)
    else:
        field = _default_field_for(q, k)
    subfield = config.get("subfield", None, int)
    r = config.get("r", None, int)
    rep = find_representation(field, q, k, n, d_h, subfield_order=subfield, r=r,
                              set_r=r is None,
                              r_bound=config.get("r_bound", None, int))
    return rep


_DEFAULT_TOWERS = {
    (2, 1): ((1, (1, 1)),),
    (4, 1): ((2, (1, 1, 1)),),
    (8, 1): ((3, (1, 1, 0, 1)),),
    (16, 1): ((4, (1, 1, 0, 0, 1)),),
    (2, 2): ((2, (1, 1, 1)),),
    (4, 3): ((6, (1, 1, 0, 0, 0, 0, 1)),),
    (64, 1): ((6, (1, 1, 0, 0, 0, 0, 1)),),
    (256, 1): ((8, (1, 0, 1, 1, 1, 0, 0, 0, 1)),),
}


def _default_field_for(q, k):
    key = (q, k)
    if key in _DEFAULT_TOWERS:
        return field_desc(2, _DEFAULT_TOWERS[key])
    # fall back to a single level of the right total degree
    total = (q**k).bit_length() - 1
    from .algebra import random_irreducible, field_create
    from .algebra.fields import F2

    rng = random.Random(_mix("deffield", q, k))
    defining = random_irreducible(F2, total, rng)
    return field_create(2, [(total, tuple(defining.coeffs()))])


def _targets_from_config(config: RunConfig, rep: FieldRep, seed):
    spec = config.get("target", "random:1")
    field = rep.field
    if spec.startswith("random:"):
        count = int(spec.split(":")[1])
        rng = random.Random(_mix("targets", seed, rep.r))
        return [rep.random_element(rng) for _ in range(count)]
    return [poly_from_text(field, spec)]


def _report_text(report):
    lines = []

    def emit(prefix, val):
        if isinstance(val, dict):
            for k2, v2 in val.items():
                emit(f"{prefix}.{k2}" if prefix else str(k2), v2)
        elif isinstance(val, list):
            for i, v2 in enumerate(val):
                emit(f"{prefix}[{i}]", v2)
        else:
            lines.append(f"{prefix}={val}")

    emit("", report)
    return "\n".join(lines) + "\n"
