"""Command-line front end.

Subcommands mirror the pipeline stages: find-rep, relgen, linalg, descend,
solve, plus verify (bundle check), oracle, estimate (linear-algebra cost
model) and bench-smooth (smoothness-test operation counts).  Exit codes:
0 success, 2 usage error (argparse), 3 search/budget failure, 4 failed
verification, 5 bad input or file format.
"""

from __future__ import annotations

import argparse
import random
import sys

from .algebra import Poly, poly_from_text, poly_to_text, set_run_seed
from .algebra.smoothness import (
    OpCounter,
    frobenius_powers,
    smoothness_test,
    strategy_cost_model,
    select_strategy,
)
from .algebra import random_irreducible, is_smooth_exact
from .algebra.fields import field_desc
from .field_rep import FieldRep, find_representation, SearchExhausted, verify_representation
from .linalg import SparseMatrix, LogDatabase, lanczos_solve, cost_model, LanczosFailure, build_matrix
from .relations import FactorBase, orbit_reduce, read_relations, write_relations
from .solver import (
    RunConfig,
    VerificationBundle,
    solve,
    verify,
    oracle_dlog,
    PipelineError,
    pick_generator,
)

EXIT_SEARCH = 3
EXIT_VERIFY = 4
EXIT_FORMAT = 5


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="run seed for reproducibility")
    p.add_argument("--threads", type=int, default=1,
                   help="worker budget (stages are pure; current scheduler is serial)")
    p.add_argument("--config", help="key=value config file")


def main(argv=None):
    ap = argparse.ArgumentParser(prog="dlplab", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("find-rep", help="search a field representation")
    _add_common(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dh", type=int, required=True)
    p.add_argument("--subfield", type=int)
    p.add_argument("--r-bound", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("relgen", help="generate factor-base relations")
    _add_common(p)
    p.add_argument("--rep", required=True)
    p.add_argument("--base-bound", type=int, default=3)
    p.add_argument("--want", type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("linalg", help="solve factor-base logarithms")
    _add_common(p)
    p.add_argument("--rep", required=True)
    p.add_argument("--relations", required=True)
    p.add_argument("--base-bound", type=int, default=3)
    p.add_argument("--out", required=True)

    p = sub.add_parser("descend", help="individual logarithm by descent")
    _add_common(p)
    p.add_argument("--rep", required=True)
    p.add_argument("--logdb", required=True)
    p.add_argument("--base-bound", type=int, default=3)
    p.add_argument("--target", required=True, help="polynomial text or 'random'")
    p.add_argument("--tree-out")

    p = sub.add_parser("solve", help="full pipeline")
    _add_common(p)

    p = sub.add_parser("verify", help="check a verification bundle")
    _add_common(p)
    p.add_argument("--bundle", required=True)

    p = sub.add_parser("oracle", help="Pohlig-Hellman reference solver")
    _add_common(p)
    p.add_argument("--rep", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--generator")

    p = sub.add_parser("estimate", help="linear-algebra cost model")
    _add_common(p)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--W", type=float, required=True)
    p.add_argument("--timings", required=True,
                   help="ADD,SQR,MULMOD in nanoseconds, e.g. 62,467,1853")

    p = sub.add_parser("bench-smooth", help="smoothness-test operation counts")
    _add_common(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, default=5)

    args = ap.parse_args(argv)
    set_run_seed(args.seed)
    try:
        return _dispatch(args)
    except (SearchExhausted, LanczosFailure, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


def _load_rep(path):
    return FieldRep.from_file_text(open(path).read())


def _dispatch(args):
    if args.cmd == "find-rep":
        from .solver import _default_field_for

        field = _default_field_for(args.q, args.k)
        rep = find_representation(field, args.q, args.k, args.n, args.dh,
                                  subfield_order=args.subfield, set_r=True,
                                  r_bound=args.r_bound)
        with open(args.out, "w") as fh:
            fh.write(rep.to_file_text())
        print(f"representation written to {args.out} (r = {rep.r})")
        return 0

    if args.cmd == "relgen":
        rep = _load_rep(args.rep)
        fb = FactorBase.build(rep, args.base_bound)
        orbit_reduce(fb, rep)
        from .relations import small_degree_relations_k1, degree1_relations, splitting_set

        want = args.want or int(len(fb.representatives) * 1.25) + 32
        if rep.k == 1:
            rels, stats = small_degree_relations_k1(rep, fb, args.base_bound, want=want)
        else:
            sk = splitting_set(rep.field, rep.q, rep.k)
            rels, stats = degree1_relations(rep, fb, sk, want=want)
        write_relations(args.out, rels)
        print(f"{len(rels)} relations written ({stats.trials} trials, rate {stats.rate:.3f})")
        return 0 if len(rels) >= len(fb.representatives) else EXIT_SEARCH

    if args.cmd == "linalg":
        rep = _load_rep(args.rep)
        fb = FactorBase.build(rep, args.base_bound)
        orbit_reduce(fb, rep)
        rels = read_relations(args.relations)
        from .solver import solve_factor_base_logs

        g = pick_generator(rep, fb)
        logdb = solve_factor_base_logs(rep, fb, rels, g, seed=args.seed)
        with open(args.out, "w") as fh:
            fh.write(logdb.to_file_text())
        print(f"{len(logdb)} logarithms written (generator {poly_to_text(g)})")
        return 0

    if args.cmd == "descend":
        rep = _load_rep(args.rep)
        fb = FactorBase.build(rep, args.base_bound)
        orbit_reduce(fb, rep)
        logdb = LogDatabase.from_file_text(open(args.logdb).read())
        from .solver import logdb_lookup_fn
        from .descent import descend, assemble_log

        g = pick_generator(rep, fb)
        if args.target == "random":
            target = rep.random_element(random.Random(args.seed))
        else:
            target = poly_from_text(rep.field, args.target)
        lookup = logdb_lookup_fn(rep, fb, logdb)
        tree = descend(rep, target, g, lookup, args.base_bound, seed=args.seed)
        log_val = assemble_log(tree, rep, lookup)
        gbar = rep.pow(g, rep.c)
        if rep.pow(target, rep.c) != rep.pow(gbar, log_val):
            print("descent result failed verification", file=sys.stderr)
            return EXIT_VERIFY
        if args.tree_out:
            with open(args.tree_out, "w") as fh:
                fh.write(tree.to_file_text())
        print(f"log = {log_val}")
        return 0

    if args.cmd == "solve":
        if not args.config:
            print("solve requires --config", file=sys.stderr)
            return EXIT_FORMAT
        cfg = RunConfig.load(args.config)
        if args.seed:
            cfg.values["seed"] = str(args.seed)
        result = solve(cfg, progress=lambda stage, msg: print(f"[{stage}] {msg}"))
        for tgt, log_val, _tree in result.targets:
            print(f"log({poly_to_text(tgt)}) = {log_val}")
        return 0

    if args.cmd == "verify":
        bundle = VerificationBundle.from_file_text(open(args.bundle).read())
        ok = verify(bundle)
        print("verification successful" if ok else "verification FAILED")
        return 0 if ok else EXIT_VERIFY

    if args.cmd == "oracle":
        rep = _load_rep(args.rep)
        if args.generator:
            g = poly_from_text(rep.field, args.generator)
        else:
            fb = FactorBase.build(rep, 1)
            g = pick_generator(rep, fb)
        target = poly_from_text(rep.field, args.target)
        gbar = rep.pow(g, rep.c)
        tbar = rep.pow(target, rep.c)
        log_val = oracle_dlog(rep, gbar, tbar, rep.r, seed=args.seed)
        print(f"log = {log_val}")
        return 0

    if args.cmd == "estimate":
        import math

        t_add, t_sqr, t_mul = (float(x) * 1e-9 for x in args.timings.split(","))
        seconds = cost_model(args.N, args.W, t_add, t_sqr, t_mul)
        print(f"estimated linear-algebra time: {seconds:.4e} s (~2^{math.log2(seconds):.1f} s)")
        return 0

    if args.cmd == "bench-smooth":
        from .solver import _default_field_for

        field = _default_field_for(args.q, 1)
        rng = random.Random(args.seed)
        s1, rs1 = 1, None
        strat, rs = select_strategy(2, args.q, args.n, args.m)
        print(f"selected strategy {strat} with (r, s) = {rs}")
        for strategy in (1, 2):
            counter = OpCounter()
            agree = True
            for _ in range(args.trials):
                f = random_irreducible(field, args.n, rng) if args.n <= 12 else \
                    Poly.random_monic(field, args.n, rng)
                res = smoothness_test(f, args.m, strategy=strategy, counter=counter)
                if res != is_smooth_exact(f, args.m) and res is False:
                    agree = False
            per = counter.fq_mults / args.trials
            r_, s_ = min(((r0, s0) for r0, s0 in _splittings_for(args.q)),
                         key=lambda t: strategy_cost_model(2, t[0], t[1], args.n, args.m, strategy))
            model = strategy_cost_model(2, r_, s_, args.n, args.m, strategy)
            model_full = model + 2 * args.n * args.n * ((args.m // 2) + (args.m % 2 > 0) + 0)
            print(f"strategy {strategy}: measured {per:.0f} F_q-mults/test; "
                  f"power model {model}; with product phase {model_full}; "
                  f"never-false-negative: {agree}")
        return 0

    raise AssertionError("unhandled command")


def _splittings_for(q):
    l = q.bit_length() - 1
    return [(r, l // r) for r in range(1, l + 1) if l % r == 0]


if __name__ == "__main__":
    sys.exit(main())
