"""
Minimal Sullivan models built degree by degree against a computable target.

At stage k the builder adds closed generators for the cokernel of
H^k(φ) and then generators whose differentials kill the kernel of
H^{k+1}(φ).  Only the simply-connected case is handled; a CDGA with
H^1 != 0 has to be used as its own model (``SullivanModel.identity``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from rht.cdga import CDGA
from rht.cohomology import class_of, cohomology, primitive
from rht.errors import NotSimplyConnected, SplittingInconsistent, TargetNotComputable, ValidationError
from rht.graded import AlgebraContext, Element
from rht.linalg import Echelon, kernel_of_columns


class Opaque:
    """Image of a generator that has no finite description in the target
    (a differential form known only through certificates)."""

    def __init__(self, label: str):
        self.label = label

    def __repr__(self):
        return f"Opaque({self.label!r})"

    def __eq__(self, other):
        return isinstance(other, Opaque) and other.label == self.label

    __hash__ = None


@dataclass
class ModelStepReport:
    degree: int
    c_added: list = field(default_factory=list)
    n_added: list = field(default_factory=list)


class SullivanModel:
    """A model ``(ΛV, d)`` with its map φ to a target and C/N flags.

    ``target`` is a CDGA or FiniteGradedAlgebra, or None when the target is
    only known through its cohomology ``target_cohomology`` (then φ values
    are elements of that algebra, 0, or ``Opaque``).
    """

    def __init__(self, algebra: CDGA, phi: dict, flags: dict, built_through: int,
                 target=None, target_cohomology=None, steps=(), name: str = "model"):
        self.algebra = algebra
        self.phi = dict(phi)
        self.flags = dict(flags)
        self.built_through = built_through
        self.target = target
        self.target_cohomology = target_cohomology
        if target_cohomology is None and target is not None and hasattr(target, "top"):
            self.target_cohomology = target
        self.steps = list(steps)
        self.name = name
        self._phi_cache = {}
        ctx = algebra.ctx
        for g in ctx.names:
            if self.flags.get(g) not in ("C", "N"):
                raise ValidationError(f"generator {g} has no C/N flag")

    @property
    def ctx(self) -> AlgebraContext:
        return self.algebra.ctx

    @property
    def computable(self) -> bool:
        return self.target is not None and getattr(self.target, "computable", False)

    @classmethod
    def identity(cls, A: CDGA, name: str | None = None) -> "SullivanModel":
        """Use a minimal CDGA as its own model (φ = id).  Closed generators are
        flagged C, the rest N."""
        ctx = A.ctx
        phi = {g: ctx.gen(g) for g in ctx.names}
        flags = {g.name: ("N" if A.d[g.index] else "C") for g in ctx.gens}
        top = max(ctx.degrees, default=0)
        return cls(A, phi, flags, built_through=top, target=A, name=name or A.name)

    # -- φ ----------------------------------------------------------------

    def phi_monomial(self, m):
        out = self._phi_cache.get(m)
        if out is not None:
            return out
        T = self.target
        if not m:
            out = T.one()
        else:
            img = self.phi[self.ctx.names[m[-1]]]
            if isinstance(img, Opaque):
                raise TargetNotComputable(f"phi({self.ctx.names[m[-1]]}) is opaque")
            if len(m) == 1:
                out = T.normal_form(img) if img else img
            else:
                out = T.mul(self.phi_monomial(m[:-1]), img)
        self._phi_cache[m] = out
        return out

    def phi_of(self, e: Element) -> Element:
        """Image of a model element in the target (computable targets only)."""
        if not self.computable:
            raise TargetNotComputable("target has no finite description")
        T = self.target
        out = T.one() * 0
        for m, c in e.terms.items():
            img = self.phi_monomial(m)
            if img:
                out = out + img.scale(c)
        return out

    def n_generators(self, upto: int | None = None) -> list:
        upto = self.built_through if upto is None else upto
        return [g for g in self.ctx.gens if self.flags[g.name] == "N" and g.degree <= upto]

    def c_generators(self, upto: int | None = None) -> list:
        upto = self.built_through if upto is None else upto
        return [g for g in self.ctx.gens if self.flags[g.name] == "C" and g.degree <= upto]

    # -- validation --------------------------------------------------------

    def validate(self):
        """Minimality, closedness of C, injectivity of d on N, and φ∘d = d∘φ
        on generators (or its cohomological shadow for opaque targets)."""
        A = self.algebra
        ctx = self.ctx
        for g in ctx.gens:
            img = A.d[g.index]
            for m in img.terms:
                if len(m) < 2:
                    raise ValidationError(f"d({g.name}) = {img} has a linear term")
        canonical_splitting(self)
        if self.computable:
            T = self.target
            for g in ctx.gens:
                lhs = self.phi_of(A.d[g.index])
                rhs = T.normal_form(T.differentiate(self.phi[g.name]))
                if lhs != rhs:
                    raise ValidationError(f"phi(d {g.name}) != d(phi {g.name})")
        elif self.target_cohomology is not None:
            F = self.target_cohomology
            for g in ctx.gens:
                if self.flags[g.name] != "N":
                    continue
                img = _phi_cohomology(self, A.d[g.index])
                if img is not None and img:
                    raise ValidationError(f"[phi(d {g.name})] = {img} is not zero in {F.name}")
        return True

    def __repr__(self):
        counts = {}
        for g in self.ctx.gens:
            counts.setdefault(g.degree, [0, 0])[0 if self.flags[g.name] == "C" else 1] += 1
        return f"SullivanModel({self.name!r}, C/N per degree {counts})"


def _phi_cohomology(m: SullivanModel, e: Element):
    """Cohomology class of φ(e) for models whose φ takes closed generators to
    classes of ``target_cohomology``; None if e involves opaque images."""
    F = m.target_cohomology
    out = F.zero()
    names = m.ctx.names
    for mono, c in e.terms.items():
        term = F.one()
        for i in mono:
            img = m.phi[names[i]]
            if isinstance(img, Opaque):
                return None
            term = term * img
        out = out + term.scale(c)
    return out


def _fresh(name, used):
    new = name
    k = 2
    while new in used:
        new = f"{name}_{k}"
        k += 1
    used.add(new)
    return new


def _rep_name(T, elem):
    if len(elem.terms) == 1:
        (mono, c), = elem.terms.items()
        if c == 1 and len(mono) == 1:
            return T.format_monomial(mono) if hasattr(T, "format_monomial") else T.ctx.format_monomial(mono)
    return None


def build_minimal_model(target, s: int, name: str = "model") -> SullivanModel:
    """Minimal model of ``target`` through degree ``s``.

    H(φ) is an isomorphism in degrees <= s and injective in degree s+1.
    """
    if not getattr(target, "computable", False):
        raise TargetNotComputable("target is not degreewise computable")
    if cohomology(target, 0).dim != 1:
        raise NotSimplyConnected("H^0 of the target is not Q")
    if cohomology(target, 1).dim != 0:
        raise NotSimplyConnected("H^1 of the target is nonzero; use the CDGA as its own model")

    decls = []
    dmap = {}
    phi = {}
    flags = {}
    used = set()
    steps = []
    ctx_of = getattr(target, "ctx", target)
    cache = {}

    model = _rebuild(decls, dmap, phi, flags, target, name, cache)
    for k in range(2, s + 1):
        step = ModelStepReport(k)
        HA = cohomology(target, k)
        HM = cohomology(model.algebra, k)
        ech = Echelon(HA.dim)
        for rep in HM.representatives:
            ech.add(_coords(class_of(target, model.phi_of(rep))))
        for t in range(HA.dim):
            lead, _ = ech.add({t: Fraction(1)})
            if lead < 0:
                continue
            rep = target.from_vector(k, HA.rep_vectors[t])
            nm = _rep_name(ctx_of, rep)
            nm = _fresh(nm if nm and nm not in used else f"x{k}_{len(step.c_added) + 1}", used)
            decls.append((nm, k))
            dmap[nm] = None
            phi[nm] = rep
            flags[nm] = "C"
            step.c_added.append((nm, rep))
        if step.c_added:
            model = _rebuild(decls, dmap, phi, flags, target, name, cache)

        HA1 = cohomology(target, k + 1)
        HM1 = cohomology(model.algebra, k + 1)
        reps = HM1.representatives
        cols = [_coords(class_of(target, model.phi_of(r))) for r in reps]
        ker = kernel_of_columns(HA1.dim, cols)
        for vec in ker.vectors:
            z = model.ctx.zero()
            for j, c in sorted(vec.items()):
                z = z + reps[j].scale(c)
            pre = primitive(target, model.phi_of(z))
            nm = _fresh(f"y{k}_{len(step.n_added) + 1}", used)
            decls.append((nm, k))
            dmap[nm] = z
            phi[nm] = pre
            flags[nm] = "N"
            step.n_added.append((nm, z))
        if step.n_added:
            model = _rebuild(decls, dmap, phi, flags, target, name, cache)
        steps.append(step)

    model = _rebuild(decls, dmap, phi, flags, target, name, cache)
    model.built_through = s
    model.steps = steps
    return model


def _coords(coords) -> dict:
    return {i: c for i, c in enumerate(coords) if c}


def _rebuild(decls, dmap, phi, flags, target, name, cache):
    ctx = AlgebraContext(decls)
    d = {}
    for nm, e in dmap.items():
        d[nm] = ctx.zero() if e is None else Element._raw(ctx, dict(e.terms))
    A = CDGA(ctx, d, name=name)
    m = SullivanModel(A, phi, flags, built_through=0, target=target, name=name)
    m._phi_cache = cache
    return m


def verify_quasi_iso_range(m: SullivanModel, degrees) -> list:
    """Per degree: dims of H(model) and H(target), whether H(φ) is an
    isomorphism / injective there, and which of the two the construction
    guarantees (``expected``: iso through the built degree, injective one
    degree above, nothing beyond)."""
    if not m.computable:
        raise TargetNotComputable("target has no finite description")
    out = []
    for k in degrees:
        HM = cohomology(m.algebra, k)
        HA = cohomology(m.target, k)
        ech = Echelon(HA.dim)
        for rep in HM.representatives:
            ech.add(_coords(class_of(m.target, m.phi_of(rep))))
        r = ech.rank
        s = m.built_through
        out.append({
            "degree": k,
            "model_dim": HM.dim,
            "target_dim": HA.dim,
            "iso": r == HM.dim == HA.dim,
            "injective": r == HM.dim,
            "flag": "iso" if r == HM.dim == HA.dim else "injective-only" if r == HM.dim else "neither",
            "expected": "iso" if k <= s else "injective" if k == s + 1 else "none",
        })
    return out


def canonical_splitting(m: SullivanModel) -> dict:
    """Per degree ``(C names, N names)`` with C^k = ker(d) ∩ V^k recomputed by
    linear algebra and checked against the flags."""
    A = m.algebra
    ctx = m.ctx
    out = {}
    for k in sorted(set(ctx.degrees)):
        gens = ctx.gens_of_degree(k)
        rows = {}
        cols = []
        for g in gens:
            col = {}
            for mono, c in A.d[g.index].terms.items():
                col[rows.setdefault(mono, len(rows))] = c
            cols.append(col)
        ker = kernel_of_columns(len(rows), cols)
        c_pos = [i for i, g in enumerate(gens) if m.flags[g.name] == "C"]
        n_pos = [i for i, g in enumerate(gens) if m.flags[g.name] == "N"]
        if ker.dim != len(c_pos) or not all(ker.contains({i: Fraction(1)}) for i in c_pos):
            raise SplittingInconsistent(
                f"degree {k}: ker d has dimension {ker.dim} but {len(c_pos)} generators are flagged C")
        ech = Echelon(len(rows))
        for i in n_pos:
            if ech.add(cols[i])[0] < 0:
                raise SplittingInconsistent(f"degree {k}: d is not injective on N")
        out[k] = ([gens[i].name for i in c_pos], [gens[i].name for i in n_pos])
    return out
