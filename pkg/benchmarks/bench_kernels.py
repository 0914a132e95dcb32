"""Compiled vs pure-Python kernels.

Each backend runs in its own interpreter (the backend is chosen at import
time; RHT_PURE_PYTHON=1 forces the fallback).  Workloads:

  monomial   Koszul products of random monomials in a 130-generator context
  eliminate  closed degree-7 ideal elements of the G2 case-study model
             (5850 columns, sparse fraction-free elimination)
  formality  the full s-formality run of the case study
  sparse     raw echelon + back substitution of a random sparse integer
             matrix (kernel-only; coefficient growth dominates)

Usage: python benchmarks/bench_kernels.py [--repeat N] [--only NAME]
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    from rht import joyce
    from rht.formality import closed_ideal_elements, s_formality
    from rht.graded import make_context

    ctx = make_context(joyce.model_decls())
    rnd = random.Random(0)
    n = len(ctx)
    pairs = [(tuple(sorted(rnd.sample(range(n), 3))), tuple(sorted(rnd.sample(range(n), 2)))) for _ in range(50000)]

    def monomial():
        mul = ctx.mul_monomials
        for a, b in pairs:
            mul(a, b)

    def eliminate():
        m = joyce.joyce_model()
        m.algebra._dcache.clear()
        closed_ideal_elements(m, 7)

    rows = [{rnd.randrange(200): rnd.randint(1, 5) for _ in range(5)} for _ in range(250)]

    def sparse():
        from rht import kernels

        piv = {}
        for r in rows:
            kernels.echelon_insert(dict(r), piv, 200)
        kernels.back_substitute(piv, 200)

    def formality():
        s_formality(joyce.joyce_model(), 7, joyce.joyce_cohomology(), joyce.joyce_certificates())

    return {"monomial": monomial, "eliminate": eliminate, "sparse": sparse, "formality": formality}


def inner(repeat, only):
    from rht import kernels

    out = {"backend": kernels.BACKEND}
    for name, fn in workloads().items():
        if only and name != only:
            continue
        out[name] = _time(fn, repeat)
    print(json.dumps(out))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--only", choices=["monomial", "eliminate", "sparse", "formality"])
    ap.add_argument("--inner", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.inner:
        inner(args.repeat, args.only)
        return
    rows = []
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("RHT_PURE_PYTHON", None)
        if pure:
            env["RHT_PURE_PYTHON"] = "1"
        cmd = [sys.executable, __file__, "--inner", "--repeat", str(args.repeat)]
        if args.only:
            cmd += ["--only", args.only]
        res = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
        rows.append(json.loads(res.stdout))
    names = [k for k in rows[0] if k != "backend"]
    print(f"{'workload':<12}" + "".join(f"{r['backend']:>12}" for r in rows) + f"{'speedup':>10}")
    for k in names:
        a, b = rows[0][k], rows[1][k]
        print(f"{k:<12}{a:>11.3f}s{b:>11.3f}s{b / a:>9.2f}x")
    if rows[0]["backend"] == rows[1]["backend"]:
        print("note: compiled extension not available; both runs used the python backend")


if __name__ == "__main__":
    main()
