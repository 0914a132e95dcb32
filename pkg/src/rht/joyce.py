"""
Built-in case study: a compact G2-manifold of dimension 7 obtained by
resolving T^7 / Z_2^3, whose cohomology ring, degree-3 Sullivan model and
geometric certificates are encoded here.

Index ranges: delta in 1..3 (the three involutions), i in 1..4, j in 1..3.
Names used throughout:

    c_{d}_{i}     degree 2, one per resolved singular torus
    td_{d}, ti_{i}, c_{d}_{i}_{j}       degree 3 closed classes
    tdp_{d}, tip_{i}, cp_{d}_{i}_{j}    their degree 4 duals
    cp_{d}_{i}    degree 5 dual of c_{d}_{i}
    n_{d}_{k}     k = 2..4, d n = c_{d}_{k}^2 - c_{d}_{1}^2
    ns_{a}_{b}    one per unordered pair a < b of degree 2 generators,
                  d ns = c_a * c_b, where a, b are written like ``11``, ``34``
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from rht.cdga import CDGA, pd_check, presented_quotient_table, quotient_complex
from rht.cohomology import betti as betti_numbers
from rht.formality import (
    CertificateSet,
    _closed_in_span,
    betti_zero,
    closed_ideal_elements,
    exact_monomial,
    fm_degree,
    ideal_monomials,
    phi_zero,
    s_formality,
    zero_product,
)
from rht.graded import AlgebraContext
from rht.linalg import Echelon, SubspaceBasis, kernel_of_columns, quotient_dim
from rht.minimal import Opaque, SullivanModel, canonical_splitting

DELTAS = (1, 2, 3)
IS = (1, 2, 3, 4)
JS = (1, 2, 3)
KS = (2, 3, 4)
DIMENSION = 7

# Dimension of the degree-5 quotient stated for the original computer check.
STATED_H5_QUOTIENT = 76


@dataclass(frozen=True)
class JoyceIndex:
    """A generator of the case study: its kind and its (delta, i, j) indices."""

    kind: str  # c, cp, t_delta, t_i, tp_delta, tp_i, c3, cp4, n, ns
    delta: int | None = None
    i: int | None = None
    j: int | None = None
    pair: tuple | None = None

    @property
    def name(self) -> str:
        k = self.kind
        if k == "c":
            return f"c_{self.delta}_{self.i}"
        if k == "cp":
            return f"cp_{self.delta}_{self.i}"
        if k == "c3":
            return f"c_{self.delta}_{self.i}_{self.j}"
        if k == "cp4":
            return f"cp_{self.delta}_{self.i}_{self.j}"
        if k == "t_delta":
            return f"td_{self.delta}"
        if k == "t_i":
            return f"ti_{self.i}"
        if k == "tp_delta":
            return f"tdp_{self.delta}"
        if k == "tp_i":
            return f"tip_{self.i}"
        if k == "n":
            return f"n_{self.delta}_{self.i}"
        if k == "ns":
            (d1, i1), (d2, i2) = self.pair
            return f"ns_{d1}{i1}_{d2}{i2}"
        raise ValueError(f"unknown kind {k!r}")


def c(delta, i) -> str:
    return JoyceIndex("c", delta, i).name


def n(delta, k) -> str:
    return JoyceIndex("n", delta, k).name


def ns(a, b) -> str:
    a, b = sorted((a, b))
    return JoyceIndex("ns", pair=(a, b)).name


C2 = tuple((d, i) for d in DELTAS for i in IS)
PAIRS = tuple(itertools.combinations(C2, 2))


def closed_degree3():
    out = [JoyceIndex("t_delta", d) for d in DELTAS]
    out += [JoyceIndex("t_i", i=i) for i in IS]
    out += [JoyceIndex("c3", d, i, j) for d in DELTAS for i in IS for j in JS]
    return out


def cohomology_basis():
    """``(name, degree)`` for the basis of H*(M) in degree order."""
    out = [("one", 0)]
    out += [(c(d, i), 2) for d, i in C2]
    out += [(g.name, 3) for g in closed_degree3()]
    out += [(JoyceIndex("tp_delta", d).name, 4) for d in DELTAS]
    out += [(JoyceIndex("tp_i", i=i).name, 4) for i in IS]
    out += [(JoyceIndex("cp4", d, i, j).name, 4) for d in DELTAS for i in IS for j in JS]
    out += [(JoyceIndex("cp", d, i).name, 5) for d, i in C2]
    out.append(("vol", DIMENSION))
    return out


def cohomology_presentation():
    """The stated products: ``(relations, pairings)`` as accepted by
    ``presented_quotient_table``."""
    relations = [(c(d, i), c(d, i), {f"tdp_{d}": -2}) for d, i in C2]
    pairings = [(c(d, i), f"cp_{d}_{i}", -2) for d, i in C2]
    pairings += [(f"c_{d}_{i}_{j}", f"cp_{d}_{i}_{j}", -2) for d in DELTAS for i in IS for j in JS]
    pairings += [(f"td_{d}", f"tdp_{d}", 8) for d in DELTAS]
    pairings += [(f"ti_{i}", f"tip_{i}", 8) for i in IS]
    return relations, pairings


@lru_cache(maxsize=None)
def joyce_cohomology():
    """The cohomology ring as a multiplication table, with the products
    that associativity forces recorded in ``.repairs``."""
    relations, pairings = cohomology_presentation()
    return presented_quotient_table(cohomology_basis(), relations, pairings, DIMENSION,
                                    name="joyce-H")


def model_decls():
    decls = [(c(d, i), 2) for d, i in C2]
    decls += [(g.name, 3) for g in closed_degree3()]
    decls += [(n(d, k), 3) for d in DELTAS for k in KS]
    decls += [(ns(a, b), 3) for a, b in PAIRS]
    return decls


def model_differential(ctx: AlgebraContext) -> dict:
    g = ctx.gen
    dmap = {}
    for d in DELTAS:
        for k in KS:
            dmap[n(d, k)] = g(c(d, k)) ** 2 - g(c(d, 1)) ** 2
    for a, b in PAIRS:
        dmap[ns(a, b)] = g(c(*a)) * g(c(*b))
    return dmap


@lru_cache(maxsize=None)
def joyce_model() -> SullivanModel:
    """The minimal model through degree 3.  φ sends closed generators to the
    classes of the same name, every ns to 0, and each n to an opaque form."""
    F = joyce_cohomology()
    ctx = AlgebraContext(model_decls())
    A = CDGA(ctx, model_differential(ctx), name="joyce-model", total=False)
    phi = {}
    flags = {}
    for gen in ctx.gens:
        nm = gen.name
        if nm.startswith("ns_"):
            phi[nm] = F.zero()
            flags[nm] = "N"
        elif nm.startswith("n_"):
            phi[nm] = Opaque(f"form {nm}")
            flags[nm] = "N"
        else:
            phi[nm] = F.element(nm)
            flags[nm] = "C"
    m = SullivanModel(A, phi, flags, built_through=3, target=None, target_cohomology=F,
                      name="joyce-model")
    m.validate()
    return m


PROVENANCE = {
    "zero-product": "degree-2 representatives are Thom forms on pairwise disjoint "
                    "tubular neighbourhoods, so distinct ones multiply to zero",
    "phi-zero": "generators encoding mixed-product relations are sent to 0 by the model map",
    "thom": "n restricted near the support of {c} is closed; after subtracting a compactly "
            "supported closed Thom form it has a local primitive z, and d({c}*z) = {c}^2*n",
    "integral": "the integral of {c}*n over the 5-cycle dual to {c} vanishes, since "
                "c*n is not closed in the model of that cycle",
    "betti-zero": "the cohomology table has no classes in degree 6",
}


def joyce_certificates() -> CertificateSet:
    facts = []
    for a, b in PAIRS:
        facts.append(zero_product(c(*a), c(*b), PROVENANCE["zero-product"]))
    for a, b in PAIRS:
        facts.append(phi_zero(ns(a, b), PROVENANCE["phi-zero"]))
    for d in DELTAS:
        for k in KS:
            for a in C2:
                kind = "integral" if a in ((d, 1), (d, k)) else "thom"
                ref = PROVENANCE[kind].format(c=c(*a))
                facts.append(exact_monomial([(c(*a), 2), (n(d, k), 1)], ref))
    F = joyce_cohomology()
    if F.betti(6) == 0:
        facts.append(betti_zero(6, PROVENANCE["betti-zero"]))
    return CertificateSet(facts, name="joyce")


@lru_cache(maxsize=None)
def effective_complex() -> CDGA:
    """Λ(V^{<=3}) modulo the DG ideal of the ns generators."""
    m = joyce_model()
    ctx = m.ctx
    E = quotient_complex(m.algebra, [ctx.gen(ns(a, b)) for a, b in PAIRS])
    E.name = "joyce-E"
    return E


# -- degree-5 computation ----------------------------------------------------------


@dataclass
class H5Result:
    definition: str
    dimension: int
    ambient: int
    closed: int
    removed: int
    basis: list

    def to_dict(self, with_basis=False):
        out = {"definition": self.definition, "dimension": self.dimension,
               "ideal_dim": self.ambient, "closed_dim": self.closed, "removed_dim": self.removed}
        if with_basis:
            out["basis"] = [str(e) for e in self.basis]
        return out


def _ns_monomials(m, monos):
    is_ns = [nm.startswith("ns_") for nm in m.ctx.names]
    return [mono for mono in monos if any(is_ns[i] for i in mono)]


def degree5_quotient(definition: str = "D1") -> H5Result:
    """Closed degree-5 ideal elements modulo the ones killed by φ.

    D1: in the full truncated model, closed elements of the degree-5 ideal
    modulo the closed elements inside span(ns * degree 2).
    D2: closed elements of the image of the degree-5 ideal in the effective
    complex.

    ``basis`` lists complement representatives (echelon-leading).
    """
    m = joyce_model()
    if definition == "D1":
        monos = ideal_monomials(m, 5, 3)
        closed = closed_ideal_elements(m, 5, 3)
        _, ns_closed = _closed_in_span(m, _ns_monomials(m, monos))
        dim5 = m.ctx.dim(5)
        sub = SubspaceBasis.span(dim5, [m.ctx.vector(z, 5) for z in ns_closed])
        q = quotient_dim(closed, sub)
        ech = Echelon(dim5)
        for v in sub.vectors:
            ech.add(v)
        reps = [m.ctx.from_vector(5, v) for v in closed.vectors if ech.add(v)[0] >= 0]
        return H5Result("D1", q, len(monos), closed.dim, sub.dim, reps)
    if definition == "D2":
        E = effective_complex()
        monos = ideal_monomials(m, 5, 3)
        image = SubspaceBasis.span(E.dim(5), [E.vector(m.ctx.monomial(mono), 5) for mono in monos])
        dimg = []
        for v in image.vectors:
            dimg.append(E.vector(E.normal_form(E.differentiate(E.from_vector(5, v))), 6))
        ker = kernel_of_columns(E.dim(6), dimg)
        basis = []
        for kv in ker.vectors:
            vec = {}
            for j, coef in kv.items():
                for col, x in image.vectors[j].items():
                    vec[col] = vec.get(col, 0) + coef * x
            basis.append(E.from_vector(5, {k: v for k, v in vec.items() if v}))
        return H5Result("D2", ker.dim, image.dim, ker.dim, 0, basis)
    raise ValueError(f"unknown definition {definition!r}; use D1 or D2")


def prototype_element():
    """c_{a1} n_1 - c_{a4} n_2 - c_{a2} n_{a4} for alpha = 1, with
    d n_1 = c_{a1} c_{a2} and d n_2 = c_{a1} c_{a3}."""
    m = joyce_model()
    g = m.ctx.gen
    n1 = g(ns((1, 1), (1, 2)))
    n2 = g(ns((1, 1), (1, 3)))
    return g(c(1, 1)) * n1 - g(c(1, 4)) * n2 - g(c(1, 2)) * g(n(1, 4))


def prototype_check(alpha: int = 1) -> dict:
    m = joyce_model()
    E = effective_complex()
    g = m.ctx.gen
    n1 = g(ns((alpha, 1), (alpha, 2)))
    n2 = g(ns((alpha, 1), (alpha, 3)))
    z = g(c(alpha, 1)) * n1 - g(c(alpha, 4)) * n2 - g(c(alpha, 2)) * g(n(alpha, 4))
    image = E.normal_form(z)
    expected = E.normal_form(-(g(c(alpha, 2)) * g(n(alpha, 4))))
    return {
        "element": str(z),
        "closed_in_model": not m.algebra.differentiate(z),
        "closed_in_effective": not E.normal_form(E.differentiate(z)),
        "effective_image": str(image),
        "image_matches": image == expected,
    }


def product_identity_check(alpha: int = 1) -> dict:
    """d(n_{a2} n_{a4}) lies in span{c_{a1}^2 (n_{a2} - n_{a4})} plus the
    zero-product ideal plus the span of certified exact monomials."""
    m = joyce_model()
    A = m.algebra
    ctx = m.ctx
    g = ctx.gen
    lhs = A.differentiate(g(n(alpha, 2)) * g(n(alpha, 4)))
    c1sq = g(c(alpha, 1)) ** 2
    expected = (c1sq * (g(n(alpha, 2)) - g(n(alpha, 4))) + g(c(alpha, 2)) ** 2 * g(n(alpha, 4))
                - g(c(alpha, 4)) ** 2 * g(n(alpha, 2)))
    bound = joyce_certificates().bind(m)
    gens = [c1sq * (g(n(alpha, 2)) - g(n(alpha, 4)))]
    idx = ctx.basis_index(7)
    span = [ctx.vector(e, 7) for e in gens]
    exact = []
    for mono in ctx.basis(7):
        fact = bound.monomials.get(mono)
        if fact is not None:
            exact.append(mono)
            span.append({idx[mono]: Fraction(1)})
            continue
        distinct = sorted(set(mono))
        if any(frozenset((x, y)) in bound.pairs for x, y in itertools.combinations(distinct, 2)):
            span.append({idx[mono]: Fraction(1)})
    S = SubspaceBasis.span(ctx.dim(7), span)
    return {
        "differential": str(lhs),
        "matches_expansion": lhs == expected,
        "in_span": S.contains(ctx.vector(lhs, 7)),
        "exact_terms": sorted(ctx.format_monomial(t) for t in lhs.terms if t in exact),
    }


def exported_files() -> dict:
    """The case-study data in the text formats, keyed by file name."""
    from rht.fileio import print_cdga, print_cert, print_galg

    return {
        "joyce.galg": print_galg(joyce_cohomology()),
        "joyce_model.cdga": print_cdga(joyce_model()),
        "joyce.cert": print_cert(joyce_certificates()),
    }


# -- report -------------------------------------------------------------------------


def _repairs(F):
    return [{"product": f"{a}*{b}", "value": str(v)} for a, b, v in F.repairs]


def joyce_report(degree5: bool = True, certs: CertificateSet | None = None):
    """End-to-end formality report for the case study (a FormalityReport)."""
    F = joyce_cohomology()
    m = joyce_model()
    certs = joyce_certificates() if certs is None else certs
    s = fm_degree(DIMENSION)
    split = canonical_splitting(m)
    report = s_formality(m, DIMENSION, F, certs)
    pd = pd_check(F)
    report.extra["betti"] = F.betti_vector()
    report.extra["cohomology"] = {
        "pd_nondegenerate": all(pd.nondegenerate.values()),
        "repairs": _repairs(F),
    }
    report.extra["model"] = {
        "generators": {str(k): {"C": len(cn[0]), "N": len(cn[1])} for k, cn in sorted(split.items())},
        "built_through": m.built_through,
        "betti_truncated": betti_numbers(m.algebra, 3),
    }
    report.extra["certificates"] = {"name": certs.name, "counts": dict(sorted(certs.counts().items()))}
    report.notes.append("one ns generator per unordered pair of distinct degree-2 generators (66)")
    report.notes.append("phi(n) is opaque; exactness of its products is decided only by certificates")
    assert s == report.s
    if degree5:
        d1 = degree5_quotient("D1")
        d2 = degree5_quotient("D2")
        report.extra["appendix"] = {
            "d1_dim": d1.dimension,
            "d2_dim": d2.dimension,
            "closed_ideal_dim": d1.closed,
            "ns_closed_dim": d1.removed,
            "stated_dim": STATED_H5_QUOTIENT,
            "matches_stated": d1.dimension == STATED_H5_QUOTIENT and d2.dimension == STATED_H5_QUOTIENT,
            "prototype": prototype_check(1),
            "product_identity": product_identity_check(1),
        }
    return report
