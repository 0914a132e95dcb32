"""Command-line entry point ``rht``."""

from __future__ import annotations

import argparse
import os
import sys

from rht import fileio
from rht.cdga import CDGA, FiniteGradedAlgebra, pd_check, tensor
from rht.cohomology import betti, cohomology
from rht.errors import DegreeOverflow, ParseError, RhtError, ValidationError
from rht.formality import fm_degree, s_formality, triple_massey
from rht.minimal import Opaque, SullivanModel, build_minimal_model, canonical_splitting, verify_quasi_iso_range

EXIT_OK, EXIT_NONFORMAL, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3, 4


def _load(path, kinds=(CDGA, FiniteGradedAlgebra)):
    obj = fileio.load(path)
    if not isinstance(obj, kinds):
        raise ValidationError(f"{path}: expected {' or '.join(k.__name__ for k in kinds)}")
    return obj


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_check(args):
    obj = fileio.load(args.file)
    if isinstance(obj, FiniteGradedAlgebra):
        rep = pd_check(obj)
        print(f"galg {obj.name}: top degree {obj.top}, betti {obj.betti_vector()}")
        for a, b, v in obj.repairs:
            print(f"  forced product {a}*{b} = {v}")
        bad = [d for d, ok in sorted(rep.nondegenerate.items()) if not ok]
        print("  Poincare pairing: " + ("nondegenerate" if not bad else f"degenerate in degrees {bad}"))
    elif isinstance(obj, CDGA):
        ann = getattr(obj, "annotations", None)
        if len(obj.ctx) <= 12:
            gens = ", ".join(f"{g.name}({g.degree})" for g in obj.ctx.gens)
        else:
            per = {}
            for g in obj.ctx.gens:
                per[g.degree] = per.get(g.degree, 0) + 1
            gens = ", ".join(f"{c} in degree {k}" for k, c in sorted(per.items()))
        print(f"cdga {obj.name}: {len(obj.ctx)} generators [{gens}]; d^2 = 0 checked")
        if obj.relations:
            print(f"  {len(obj.relations)} relations, descent of d checked")
        if ann:
            flags = ann.flags or {g.name: ("N" if obj.d[g.index] else "C") for g in obj.ctx.gens}
            m = SullivanModel(obj, {g: Opaque(g) for g in obj.ctx.names}, flags,
                              ann.through or 0, name=obj.name)
            split = canonical_splitting(m)
            counts = ", ".join(f"V^{k}: {len(c)} C + {len(n)} N" for k, (c, n) in split.items())
            print(f"  model annotations: splitting consistent ({counts})")
    else:
        print(f"cert {obj.name}: {len(obj)} facts {dict(sorted(obj.counts().items()))}")
    return EXIT_OK


def cmd_betti(args):
    A = _load(args.file)
    print(" ".join(str(b) for b in betti(A, args.max)))
    return EXIT_OK


def cmd_cohomology(args):
    A = _load(args.file)
    H = cohomology(A, args.degree)
    print(f"H^{args.degree} has dimension {H.dim}")
    if args.reps:
        for k, rep in enumerate(H.representatives):
            print(f"  [{k}] {rep}")
    return EXIT_OK


def cmd_model(args):
    A = _load(args.file)
    m = build_minimal_model(A, args.up_to, name=f"{A.name}-model")
    text = fileio.print_cdga(m)
    for row in verify_quasi_iso_range(m, range(args.up_to + 2)):
        print(f"# degree {row['degree']}: model {row['model_dim']}, target {row['target_dim']}, "
              f"{row['flag']} (guaranteed {row['expected']})",
              file=sys.stderr)
    _write(args.out, text)
    return EXIT_OK


def _model_for(A, args, F):
    """A SullivanModel for the formality pipeline."""
    if isinstance(A, FiniteGradedAlgebra):
        return build_minimal_model(A, fm_degree(args.dim), name=f"{A.name}-model")
    ann = getattr(A, "annotations", None)
    if ann:
        return fileio.model_from_cdga(A, F)
    if cohomology(A, 1).dim:
        return SullivanModel.identity(A)
    return build_minimal_model(A, fm_degree(args.dim), name=f"{A.name}-model")


def cmd_formality(args):
    A = _load(args.file)
    F = _load(args.galg, (FiniteGradedAlgebra,)) if args.galg else None
    if F is None and isinstance(A, FiniteGradedAlgebra):
        F = A
    certs = fileio.load(args.certs) if args.certs else None
    m = _model_for(A, args, F)
    report = s_formality(m, args.dim, F, certs)
    print(f"verdict: {report.verdict}")
    for d, e in sorted(report.ledger.items()):
        print(f"  degree {d}: ideal {e.ideal_dim}, closed {e.closed_dim}, method {e.method or 'UNDISCHARGED'}")
    if report.witness is not None:
        w = report.witness
        print(f"  Massey witness <{', '.join(str(c) for c in w.classes)}> = [{w.representative}]")
    for r in report.residuals:
        print(f"  residual in degree {r['degree']}: {r['element']} ({r['reason']})")
    if args.json:
        _write(args.json, fileio.emit_report(report))
    return report.exit_code


def cmd_massey(args):
    A = _load(args.file)
    parts = [p.strip() for p in args.classes.split(",")]
    if len(parts) != 3:
        raise ValidationError("--classes takes three comma-separated elements")
    ctx = A if isinstance(A, FiniteGradedAlgebra) else A.ctx
    a, b, c = (fileio.parse_poly(p, ctx) for p in parts)
    res = triple_massey(A, a, b, c)
    print(f"<{args.classes}> in degree {res.degree}")
    print(f"  representative: {res.representative}")
    print(f"  class: {[str(x) for x in res.representative_class]}")
    print(f"  indeterminacy dimension: {res.indeterminacy.dim}")
    print(f"  vanishes: {res.vanishes}")
    return EXIT_OK if res.vanishes else EXIT_NONFORMAL


def cmd_tensor(args):
    A = _load(args.file1, (CDGA,))
    B = _load(args.file2, (CDGA,))
    _write(args.out, fileio.print_cdga(tensor(A, B)))
    return EXIT_OK


def cmd_joyce(args):
    from rht import joyce

    report = joyce.joyce_report()
    if args.export:
        os.makedirs(args.export, exist_ok=True)
        for fname, text in joyce.exported_files().items():
            _write(os.path.join(args.export, fname), text)
    if args.json:
        _write(args.json, fileio.emit_report(report))
        if args.json == "-":
            return report.exit_code
    ex = report.extra
    print(f"betti: {tuple(ex['betti'])}")
    for rep in ex["cohomology"]["repairs"]:
        print(f"forced product: {rep['product']} = {rep['value']}")
    gens = ex["model"]["generators"]
    print("model generators: " + ", ".join(f"V^{k}: {v['C']} C + {v['N']} N" for k, v in gens.items()))
    print(f"s = {report.s} for dimension {report.dimension}")
    for d, e in sorted(report.ledger.items()):
        used = ", ".join(f"{k} {v}" for k, v in sorted(e.certificates_used.items()))
        print(f"  degree {d}: ideal {e.ideal_dim}, closed {e.closed_dim}, {e.method or 'UNDISCHARGED'}"
              + (f" ({used})" if used else ""))
    app = ex["appendix"]
    print(f"degree-5 closed ideal elements: {app['closed_ideal_dim']} "
          f"(of which {app['ns_closed_dim']} inside ns * degree 2)")
    print(f"degree-5 quotient: D1 = {app['d1_dim']}, D2 = {app['d2_dim']}, stated {app['stated_dim']}")
    if args.appendix:
        p = app["prototype"]
        print(f"prototype {p['element']}: closed in model {p['closed_in_model']}, "
              f"closed in E {p['closed_in_effective']}, image {p['effective_image']}")
        q = app["product_identity"]
        print(f"d(n_1_2*n_1_4) = {q['differential']}; in certified span: {q['in_span']}")
    print(f"verdict: {report.verdict}")
    return report.exit_code


def build_parser():
    p = argparse.ArgumentParser(prog="rht", description="Exact CDGA toolkit: minimal models, "
                                "formality certification and Massey products.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="parse and validate a .cdga, .galg or .cert file")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("betti", help="Betti numbers up to a degree")
    s.add_argument("file")
    s.add_argument("--max", type=int, required=True)
    s.set_defaults(func=cmd_betti)

    s = sub.add_parser("cohomology", help="one cohomology component")
    s.add_argument("file")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--reps", action="store_true", help="print representatives")
    s.set_defaults(func=cmd_cohomology)

    s = sub.add_parser("model", help="minimal model through a degree")
    s.add_argument("file")
    s.add_argument("--up-to", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_model)

    s = sub.add_parser("formality", help="s-formality check and verdict")
    s.add_argument("file")
    s.add_argument("--dim", type=int, required=True, help="manifold dimension n")
    s.add_argument("--galg", help="cohomology algebra of the target")
    s.add_argument("--certs", help="certificate file")
    s.add_argument("--json", help="write the JSON report here ('-' for stdout)")
    s.set_defaults(func=cmd_formality)

    s = sub.add_parser("massey", help="triple Massey product")
    s.add_argument("file")
    s.add_argument("--classes", required=True, help="three cocycles, comma separated")
    s.set_defaults(func=cmd_massey)

    s = sub.add_parser("tensor", help="tensor product of two CDGAs")
    s.add_argument("file1")
    s.add_argument("file2")
    s.add_argument("--out")
    s.set_defaults(func=cmd_tensor)

    s = sub.add_parser("joyce", help="the built-in G2 case study")
    s.add_argument("--json", nargs="?", const="-", help="write the JSON report (default stdout)")
    s.add_argument("--appendix", action="store_true", help="print the degree-5 identities")
    s.add_argument("--export", metavar="DIR", help="write the case-study .cdga/.galg/.cert files")
    s.set_defaults(func=cmd_joyce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, FileNotFoundError, IsADirectoryError) as err:
        print(f"rht: error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (DegreeOverflow, MemoryError, RecursionError) as err:
        print(f"rht: limit exceeded: {err}", file=sys.stderr)
        return EXIT_LIMIT
    except RhtError as err:
        print(f"rht: error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
