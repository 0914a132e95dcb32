"""
s-formality checking and Massey triple products.

A model with splitting V = C ⊕ N is s-formal when every closed element of
the ideal generated by N^{<=s} inside Λ(V^{<=s}) is exact in the full model.
For a closed n-manifold, s = ceil(n/2) - 1 suffices for formality.  Each
degree is discharged by one of:

``betti-zero``     H^d of the target vanishes, so every closed element is exact;
``finite-target``  exactness decided by the class of φ(z) in a computable target;
``certificates``   φ(z) is rewritten with audited geometric facts;
``pd-descent``     Poincaré duality pushes degree d up to the already
                   discharged top degree.

Degrees whose ideal component is empty, or has no closed elements, are
recorded as ``empty`` / ``no-closed``.

A degree that cannot be discharged makes the verdict Inconclusive; only a
Massey witness yields NonFormal.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from rht.cdga import pd_check
from rht.cohomology import class_of, cohomology, is_closed, primitive
from rht.errors import ModelTooShallow, NotClosed, ProductsNotExact, ValidationError
from rht.graded import Element, format_scalar
from rht.linalg import SubspaceBasis, kernel_of_columns
from rht.minimal import Opaque, SullivanModel, canonical_splitting


def fm_degree(n: int) -> int:
    """Degree s such that an n-manifold is formal iff it is s-formal."""
    if n < 2:
        raise ValueError("manifold dimension must be at least 2")
    return (n + 1) // 2 - 1


# -- certificates ----------------------------------------------------------


@dataclass(frozen=True)
class Fact:
    family: str  # zero-product | phi-zero | exact-monomial | betti-zero
    subject: tuple
    ref: str

    def key(self):
        return (self.family, self.subject)

    def describe(self) -> str:
        if self.family == "exact-monomial":
            return "*".join(n if e == 1 else f"{n}^{e}" for n, e in self.subject)
        return " ".join(str(x) for x in self.subject)


FAMILIES = ("zero-product", "phi-zero", "exact-monomial", "betti-zero")


class CertificateSet:
    """Audited facts about a model's map to a geometric target."""

    def __init__(self, facts=(), name: str = "certs"):
        self.name = name
        self.facts = []
        seen = set()
        for f in facts:
            if f.family not in FAMILIES:
                raise ValidationError(f"unknown certificate family {f.family!r}")
            if not f.ref:
                raise ValidationError(f"certificate {f.family} {f.describe()} has no provenance")
            if f.key() in seen:
                continue
            seen.add(f.key())
            self.facts.append(f)

    def family(self, name: str) -> list:
        return [f for f in self.facts if f.family == name]

    def without(self, family: str) -> "CertificateSet":
        return CertificateSet([f for f in self.facts if f.family != family], name=self.name)

    def counts(self) -> dict:
        return dict(Counter(f.family for f in self.facts))

    def betti_zero(self, d: int):
        for f in self.facts:
            if f.family == "betti-zero" and f.subject == (d,):
                return f
        return None

    def __len__(self):
        return len(self.facts)

    def __iter__(self):
        return iter(self.facts)

    def bind(self, m: SullivanModel) -> "_BoundCerts":
        return _BoundCerts(self, m)


def zero_product(a, b, ref):
    return Fact("zero-product", tuple(sorted((a, b))), ref)


def phi_zero(g, ref):
    return Fact("phi-zero", (g,), ref)


def exact_monomial(factors, ref):
    """``factors`` is a list of ``(name, exponent)``."""
    merged = {}
    for n, e in factors:
        merged[n] = merged.get(n, 0) + e
    return Fact("exact-monomial", tuple(sorted(merged.items())), ref)


def betti_zero(d, ref):
    return Fact("betti-zero", (int(d),), ref)


class _BoundCerts:
    """Certificate facts resolved against one model's generator indices."""

    def __init__(self, certs: CertificateSet, m: SullivanModel):
        ctx = m.ctx
        idx = ctx.index

        def look(name):
            if name not in idx:
                raise ValidationError(f"certificate refers to unknown generator {name!r}")
            return idx[name]

        self.phi_zero = {}
        self.pairs = {}
        self.monomials = {}
        for f in certs.facts:
            if f.family == "phi-zero":
                self.phi_zero[look(f.subject[0])] = f
            elif f.family == "zero-product":
                a, b = (look(x) for x in f.subject)
                self.pairs[frozenset((a, b)) if a != b else frozenset((a,))] = f
            elif f.family == "exact-monomial":
                mono = []
                for n, e in f.subject:
                    mono.extend([look(n)] * e)
                self.monomials[tuple(sorted(mono))] = f


@dataclass
class Certified:
    facts: list

    ok = True


@dataclass
class Residual:
    element: Element
    facts: list = field(default_factory=list)

    ok = False


def _rewrite(z: Element, bound: _BoundCerts):
    used = []
    residual = {}
    for mono, c in z.terms.items():
        fact = None
        for i in mono:
            fact = bound.phi_zero.get(i)
            if fact:
                break
        if fact is None and bound.pairs:
            distinct = sorted(set(mono))
            for x in range(len(distinct)):
                for y in range(x + 1, len(distinct)):
                    fact = bound.pairs.get(frozenset((distinct[x], distinct[y])))
                    if fact:
                        break
                if fact:
                    break
        if fact is None:
            fact = bound.monomials.get(mono)
        if fact is None:
            residual[mono] = c
        else:
            used.append(fact)
    return used, residual


def exactness_certified(m: SullivanModel, z: Element, certs: CertificateSet, check_closed=True,
                        _bound=None):
    """Certify that a closed model element is exact using ``certs``.

    Terms with a φ-zero factor or a zero-product pair vanish at form level;
    every surviving monomial must be certified exact.  Returns ``Certified``
    with the facts consumed or ``Residual`` with the uncovered part.
    """
    if check_closed and not is_closed(m.algebra, z):
        raise NotClosed(f"{z} is not closed")
    bound = _bound or certs.bind(m)
    used, residual = _rewrite(z, bound)
    if residual:
        return Residual(Element._raw(m.ctx, residual), used)
    return Certified(used)


# -- ideal -------------------------------------------------------------------


def ideal_monomials(m: SullivanModel, d: int, upto: int | None = None) -> list:
    """Degree-d monomials of Λ(V^{<=upto}) with at least one N factor."""
    upto = m.built_through if upto is None else upto
    ctx = m.ctx
    degs = ctx.degrees
    is_n = [m.flags[n] == "N" for n in ctx.names]
    out = []
    for mono in ctx.basis(d):
        if any(degs[i] > upto for i in mono):
            continue
        if any(is_n[i] for i in mono):
            out.append(mono)
    return out


def ideal_component(m: SullivanModel, d: int, upto: int | None = None) -> SubspaceBasis:
    idx = m.ctx.basis_index(d)
    rows = {idx[mono]: {idx[mono]: Fraction(1)} for mono in ideal_monomials(m, d, upto)}
    return SubspaceBasis(m.ctx.dim(d), rows)


def _closed_in_span(m: SullivanModel, monos: list) -> list:
    """Closed elements of span(monos): a kernel basis as Elements."""
    A = m.algebra
    rows = {}
    cols = []
    for mono in monos:
        col = {}
        for t, c in A._dmono(mono).terms.items():
            col[rows.setdefault(t, len(rows))] = c
        cols.append(col)
    ker = kernel_of_columns(len(rows), cols)
    return ker, [Element._raw(m.ctx, {monos[j]: c for j, c in vec.items()}) for vec in ker.vectors]


def closed_ideal_elements(m: SullivanModel, d: int, upto: int | None = None) -> SubspaceBasis:
    """Kernel of d on the degree-d ideal component, in model basis coordinates."""
    monos = ideal_monomials(m, d, upto)
    ker, _ = _closed_in_span(m, monos)
    idx = m.ctx.basis_index(d)
    rows = {idx[monos[p]]: {idx[monos[j]]: c for j, c in ker.row(p).items()} for p in ker.pivots}
    return SubspaceBasis(m.ctx.dim(d), rows, order="reverse")


def exactness_finite_target(m: SullivanModel, z: Element) -> bool:
    if not is_closed(m.algebra, z):
        raise NotClosed(f"{z} is not closed")
    img = m.phi_of(z)
    return not any(class_of(m.target, img))


# -- PD descent ---------------------------------------------------------------


@dataclass
class PDDescent:
    discharged: bool
    reason: str = ""
    checked_products: int = 0


def _phi_class_vector(m, F, name):
    img = m.phi[name]
    if isinstance(img, Opaque) or not isinstance(img, Element) or img.ctx is not F:
        return None
    return img


def pd_descent(m: SullivanModel, d: int, F, top_entry: "DegreeEntry", closed=None) -> PDDescent:
    """Discharge degree d through the pairing with C^{n-d}.

    Checks: (i) the φ-classes of C^{n-d} span H^{n-d}; (ii) the pairing
    H^d x H^{n-d} is nondegenerate; (iii) every product of a closed ideal
    element of degree d with a C^{n-d} generator is a closed ideal element
    of degree n, all of which the top-degree entry has discharged.
    """
    if F is None:
        return PDDescent(False, "no cohomology algebra supplied")
    n = F.top
    if top_entry is None or not top_entry.discharged:
        return PDDescent(False, f"degree {n} is not discharged")
    if F.betti(d) == 0:
        return PDDescent(True, "vacuous: H^d = 0")
    k = n - d
    cgens = [g for g in m.c_generators(upto=max(m.ctx.degrees, default=0)) if g.degree == k]
    if not cgens:
        return PDDescent(False, f"no C generators in degree {k}")
    vecs = []
    for g in cgens:
        img = _phi_class_vector(m, F, g.name)
        if img is None:
            return PDDescent(False, f"phi({g.name}) is not a class of {F.name}")
        vecs.append(F.vector(img, k) if img else {})
    if SubspaceBasis.span(F.dim(k), vecs).dim != F.dim(k):
        return PDDescent(False, f"phi(C^{k}) does not span H^{k}")
    if not pd_check(F).nondegenerate[d]:
        return PDDescent(False, f"pairing H^{d} x H^{k} is degenerate")
    if closed is None:
        _, closed = _closed_in_span(m, ideal_monomials(m, d, m.built_through))
    A = m.algebra
    is_n = [m.flags[x] == "N" for x in m.ctx.names]
    count = 0
    for z in closed:
        for g in cgens:
            prod = z * m.ctx.gen(g.name)
            if any(not any(is_n[i] for i in mono) for mono in prod.terms):
                return PDDescent(False, f"{z}*{g.name} leaves the ideal")
            if A.differentiate(prod):
                return PDDescent(False, f"{z}*{g.name} is not closed")
            count += 1
    return PDDescent(True, f"paired with C^{k} into degree {n}", count)


# -- report ---------------------------------------------------------------------


@dataclass
class DegreeEntry:
    degree: int
    ideal_dim: int
    closed_dim: int
    method: str | None = None
    certificates_used: dict = field(default_factory=dict)
    detail: str = ""
    residual: str | None = None
    audit: dict = field(default_factory=dict)

    @property
    def discharged(self) -> bool:
        return self.method is not None

    def to_dict(self):
        out = {
            "ideal_dim": self.ideal_dim,
            "closed_dim": self.closed_dim,
            "method": self.method,
            "certificates_used": dict(sorted(self.certificates_used.items())),
            "detail": self.detail,
        }
        if self.residual is not None:
            out["residual"] = self.residual
        if self.audit:
            out["audit"] = dict(sorted(self.audit.items()))
        return out


@dataclass
class FormalityReport:
    dimension: int
    s: int
    ledger: dict
    verdict: str
    low_degrees: dict = field(default_factory=dict)
    certificates_used: list = field(default_factory=list)
    witness: "MasseyResult | None" = None
    residuals: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return {"Formal": 0, "NonFormal": 1}.get(self.verdict, 2)

    def to_dict(self):
        out = {
            "verdict": self.verdict,
            "dimension": self.dimension,
            "s": self.s,
            "ledger": {str(d): e.to_dict() for d, e in sorted(self.ledger.items())},
            "low_degrees": {str(d): e.to_dict() for d, e in sorted(self.low_degrees.items())},
            "certificates_used": self.certificates_used,
            "residuals": self.residuals,
            "notes": self.notes,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        out.update(self.extra)
        return out


def _discharge(m, d, F, certs, bound, entry, closed):
    if entry.ideal_dim == 0:
        entry.method = "empty"
        return
    if certs is not None:
        fact = certs.betti_zero(d)
        if fact is not None:
            if F is not None and F.betti(d) != 0:
                raise ValidationError(f"certificate claims H^{d} = 0 but b_{d} = {F.betti(d)}")
            entry.method = "betti-zero"
            entry.certificates_used = {"betti-zero": 1}
            entry.detail = fact.ref
            return
    elif F is not None and F.betti(d) == 0:
        entry.method = "betti-zero"
        entry.detail = f"b_{d} = 0 in {F.name}"
        return
    if entry.closed_dim == 0:
        entry.method = "no-closed"
        return
    if m.computable:
        for z in closed:
            if not exactness_finite_target(m, z):
                entry.residual = str(z)
                entry.detail = "closed ideal element with nonzero target class"
                return
        entry.method = "finite-target"
        return
    if certs is not None:
        used = Counter()
        shapes = Counter()
        for z in closed:
            res = exactness_certified(m, z, certs, check_closed=False, _bound=bound)
            if not res.ok:
                entry.residual = str(res.element)
                entry.detail = "certificates leave a residual"
                return
            for f in res.facts:
                used[f.family] += 1
                if f.family == "exact-monomial":
                    shapes[_shape(m, f)] += 1
        entry.method = "certificates"
        entry.certificates_used = dict(used)
        entry.audit = {"surviving_monomial_shapes": dict(shapes)} if shapes else {}


def _shape(m, fact):
    """Shape of a certified monomial like ``C2^2*N3``."""
    ctx = m.ctx
    parts = []
    for name, e in fact.subject:
        g = ctx.gens[ctx.index[name]]
        tag = f"{m.flags[name]}{g.degree}"
        parts.append(tag if e == 1 else f"{tag}^{e}")
    return "*".join(sorted(parts))


def s_formality(m: SullivanModel, n: int, F=None, certs: CertificateSet | None = None,
                massey_fallback: bool = True) -> FormalityReport:
    """Run the s-formality pipeline for an n-manifold (or n-dimensional
    Poincaré duality target) and assemble the verdict."""
    s = fm_degree(n)
    if m.built_through < s:
        raise ModelTooShallow(f"model built through {m.built_through} < s = {s}")
    if F is None:
        F = m.target_cohomology
    canonical_splitting(m)
    bound = certs.bind(m) if certs is not None else None
    ledger = {}
    low = {}
    closed_sets = {}
    for d in range(1, n + 1):
        monos = ideal_monomials(m, d, s)
        if d <= s and not monos:
            continue
        _, closed = _closed_in_span(m, monos) if monos else (None, [])
        closed_sets[d] = closed
        entry = DegreeEntry(d, len(monos), len(closed))
        _discharge(m, d, F, certs, bound, entry, closed)
        (ledger if d > s else low)[d] = entry

    top = ledger.get(n)
    for book in (ledger, low):
        for d, entry in sorted(book.items()):
            if entry.discharged or d == n:
                continue
            res = pd_descent(m, d, F, top, closed_sets[d])
            if res.discharged:
                entry.method = "pd-descent"
                entry.detail = res.reason
                entry.residual = None
            elif not entry.detail:
                entry.detail = res.reason
            elif res.reason:
                entry.detail += f"; pd-descent: {res.reason}"

    ok = all(e.discharged for e in ledger.values()) and all(e.discharged for e in low.values())
    report = FormalityReport(n, s, ledger, "Formal" if ok else "Inconclusive", low_degrees=low)
    report.notes.append(f"degrees above {n} vanish in cohomology and are discharged without enumeration")
    if certs is not None:
        used = set()
        for d, entry in list(ledger.items()) + list(low.items()):
            if entry.method == "certificates":
                for z in closed_sets[d]:
                    used.update(f.key() for f in exactness_certified(
                        m, z, certs, check_closed=False, _bound=bound).facts)
            if entry.method == "betti-zero":
                used.add(("betti-zero", (d,)))
        report.certificates_used = [
            {"family": f.family, "subject": f.describe(), "ref": f.ref}
            for f in certs.facts if f.key() in used
        ]
    for d, entry in sorted(list(low.items()) + list(ledger.items())):
        if not entry.discharged:
            report.residuals.append({"degree": d, "element": entry.residual, "reason": entry.detail})
    if not ok and massey_fallback and m.computable:
        witness = massey_scan(m.target, n)
        if witness is not None:
            report.verdict = "NonFormal"
            report.witness = witness
    return report


# -- Massey products -------------------------------------------------------------


@dataclass
class MasseyResult:
    classes: tuple
    degree: int
    representative: Element
    representative_class: list
    indeterminacy: SubspaceBasis
    vanishes: bool

    def to_dict(self):
        return {
            "classes": [str(c) for c in self.classes],
            "degree": self.degree,
            "representative": str(self.representative),
            "representative_class": [format_scalar(Fraction(c)) for c in self.representative_class],
            "indeterminacy_dim": self.indeterminacy.dim,
            "vanishes": self.vanishes,
        }


def _deg(e, given):
    if given is not None:
        return given
    if not e:
        raise ValueError("degree of a zero class must be given explicitly")
    return e.degree


def triple_massey(A, a: Element, b: Element, c: Element, degrees=None) -> MasseyResult:
    """⟨[a],[b],[c]⟩ with representative x*c - (-1)^|a| a*y where dx = ab, dy = bc."""
    da, db, dc = (_deg(e, g) for e, g in zip((a, b, c), degrees or (None,) * 3))
    for e in (a, b, c):
        if e and not is_closed(A, e):
            raise NotClosed(f"{e} is not closed")
    ab = A.mul(a, b)
    bc = A.mul(b, c)
    for prod in (ab, bc):
        if prod and any(class_of(A, prod)):
            raise ProductsNotExact(f"{prod} is not exact")
    x = primitive(A, ab)
    y = primitive(A, bc)
    sign = -1 if da & 1 else 1
    r = A.mul(x, c) - A.mul(a, y).scale(sign)
    deg = da + db + dc - 1
    H = cohomology(A, deg)
    gens = []
    for k, left in ((db + dc - 1, True), (da + db - 1, False)):
        if k < 0:
            continue
        for h in cohomology(A, k).representatives:
            prod = A.mul(a, h) if left else A.mul(h, c)
            if prod:
                gens.append({i: v for i, v in enumerate(class_of(A, prod)) if v})
    indet = SubspaceBasis.span(H.dim, gens)
    rc = class_of(A, r) if r else [Fraction(0)] * H.dim
    vec = {i: v for i, v in enumerate(rc) if v}
    return MasseyResult((a, b, c), deg, r, rc, indet, indet.contains(vec))


def massey_scan(A, max_degree: int, limit: int = 20000):
    """First nonvanishing triple product of representative classes with
    result degree <= max_degree, or None."""
    tried = 0
    reps = {k: cohomology(A, k).representatives for k in range(1, max_degree + 1)}
    for p in range(1, max_degree + 1):
        for q in range(1, max_degree + 1):
            for r in range(1, max_degree + 1):
                if p + q + r - 1 > max_degree:
                    continue
                for a in reps[p]:
                    for b in reps[q]:
                        for c in reps[r]:
                            tried += 1
                            if tried > limit:
                                return None
                            try:
                                res = triple_massey(A, a, b, c)
                            except ProductsNotExact:
                                continue
                            if not res.vanishes:
                                return res
    return None
