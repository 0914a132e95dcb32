"""
Commutative differential graded algebras and finite graded algebras.

``CDGA`` is a free graded-commutative algebra with a differential, optionally
divided by an ideal generated by homogeneous relations (which must be stable
under d).  ``FiniteGradedAlgebra`` is a finite-dimensional graded algebra
given by a multiplication table on a named basis, with a fundamental class in
the top degree; it doubles as a CDGA with zero differential.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from rht.errors import (
    AssociativityContradiction,
    ContextMismatch,
    DegreeViolation,
    DifferentialDoesNotDescend,
    DSquaredNonzero,
    PairingDegenerate,
    ValidationError,
)
from rht.graded import AlgebraContext, Element, GradedContext, scalar
from rht.linalg import Echelon, MatrixQ, SubspaceBasis, rank


class CDGA:
    """Free CDGA ``(ΛV, d)``, possibly modulo a d-stable ideal.

    ``differential`` maps generator names (or indices) to Elements; omitted
    generators are closed only when ``total=False``.
    """

    def __init__(self, ctx: AlgebraContext, differential: dict, relations=(), name: str = "A",
                 total: bool = True):
        self.ctx = ctx
        self.name = name
        d = [ctx.zero()] * len(ctx)
        seen = set()
        for key, img in differential.items():
            i = ctx.index[key] if isinstance(key, str) else key
            if not isinstance(img, Element):
                img = ctx.zero() if not img else ctx.one().scale(img)
            if img.ctx != ctx:
                raise ContextMismatch(f"d({ctx.names[i]}) lives in another context")
            d[i] = img
            seen.add(i)
        if total and len(seen) != len(ctx):
            missing = [ctx.names[i] for i in range(len(ctx)) if i not in seen]
            raise ValidationError(f"differential not given for {', '.join(missing)}")
        self.d = tuple(d)
        self.relations = tuple(r for r in relations if r)
        self._dcache = {}
        self._ideal = {}
        self._qbasis = {}
        self._validate()

    # -- validation ------------------------------------------------------

    def _validate(self):
        ctx = self.ctx
        for g in ctx.gens:
            img = self.d[g.index]
            if not img:
                continue
            try:
                deg = img.degree
            except ValueError:
                raise DegreeViolation(f"d({g.name}) = {img} is not homogeneous") from None
            if deg != g.degree + 1:
                raise DegreeViolation(f"d({g.name}) = {img} has degree {deg}, expected {g.degree + 1}")
        for r in self.relations:
            if r.ctx != ctx:
                raise ContextMismatch("relation from another context")
            if not r.is_homogeneous():
                raise ValidationError(f"relation {r} is not homogeneous")
        for g in ctx.gens:
            dd = self.normal_form(self.differentiate(self.d[g.index]))
            if dd:
                raise DSquaredNonzero(g.name, dd)
        for r in self.relations:
            dr = self.differentiate(r)
            if dr and not self.ideal(dr.degree).contains(ctx.vector(dr, dr.degree)):
                raise DifferentialDoesNotDescend(f"d({r}) = {dr} is not in the ideal")

    # -- differential ----------------------------------------------------

    def _dmono(self, m):
        out = self._dcache.get(m)
        if out is not None:
            return out
        ctx = self.ctx
        if not m:
            out = ctx.zero()
        elif len(m) == 1:
            out = self.d[m[0]]
        else:
            head = m[0]
            rest = m[1:]
            first = self.d[head] * Element._raw(ctx, {rest: Fraction(1)})
            second = Element._raw(ctx, {(head,): Fraction(1)}) * self._dmono(rest)
            if ctx.odd[head]:
                out = first - second
            else:
                out = first + second
        self._dcache[m] = out
        return out

    def differentiate(self, e: Element) -> Element:
        if e.ctx != self.ctx:
            raise ContextMismatch("element not in this CDGA")
        out = {}
        for m, c in e.terms.items():
            for m2, c2 in self._dmono(m).terms.items():
                v = out.get(m2, 0) + c * c2
                if v:
                    out[m2] = v
                else:
                    del out[m2]
        return Element._raw(self.ctx, out)

    # -- degreewise structure -------------------------------------------

    def ideal(self, d: int) -> SubspaceBasis:
        """Degree-d part of the ideal generated by the relations."""
        sb = self._ideal.get(d)
        if sb is None:
            ctx = self.ctx
            vecs = []
            for r in self.relations:
                k = d - r.degree
                if k < 0:
                    continue
                for m in ctx.basis(k):
                    prod = Element._raw(ctx, {m: Fraction(1)}) * r
                    if prod:
                        vecs.append(ctx.vector(prod, d))
            sb = SubspaceBasis.span(ctx.dim(d), vecs)
            self._ideal[d] = sb
        return sb

    def _quotient(self, d):
        q = self._qbasis.get(d)
        if q is None:
            full = self.ctx.basis(d)
            if self.relations:
                piv = set(self.ideal(d).pivots)
                keep = [i for i in range(len(full)) if i not in piv]
            else:
                keep = list(range(len(full)))
            q = (keep, {j: i for i, j in enumerate(keep)})
            self._qbasis[d] = q
        return q

    def basis(self, d: int) -> list:
        """Monomials spanning the degree-d component (non-pivot monomials
        of the ideal when relations are present)."""
        full = self.ctx.basis(d)
        return [full[j] for j in self._quotient(d)[0]]

    def dim(self, d: int) -> int:
        return len(self._quotient(d)[0])

    def normal_form(self, e: Element) -> Element:
        if not self.relations or not e:
            return e
        out = self.ctx.zero()
        for d in sorted(e.degrees()):
            part = Element._raw(self.ctx, {m: c for m, c in e.terms.items()
                                           if self.ctx.monomial_degree(m) == d})
            vec = self._reduce_full(self.ctx.vector(part, d), d)
            out = out + self.ctx.from_vector(d, vec)
        return out

    def _reduce_full(self, vec, d):
        ideal = self.ideal(d)
        if not ideal.dim:
            return vec
        res = dict(vec)
        for p in ideal.pivots:
            c = res.get(p)
            if c:
                for k, v in ideal.row(p).items():
                    w = res.get(k, 0) - c * v
                    if w:
                        res[k] = w
                    else:
                        res.pop(k, None)
        return res

    def vector(self, e: Element, d: int) -> dict:
        vec = self.ctx.vector(e, d)
        if self.relations:
            vec = self._reduce_full(vec, d)
        pos = self._quotient(d)[1]
        return {pos[k]: v for k, v in vec.items()}

    def from_vector(self, d: int, vec: dict) -> Element:
        keep = self._quotient(d)[0]
        full = self.ctx.basis(d)
        return Element(self.ctx, {full[keep[i]]: c for i, c in vec.items() if c})

    def dcolumns(self, d: int) -> list:
        """Images of the degree-d basis under d, as degree-(d+1) vectors."""
        ctx = self.ctx
        cols = []
        for m in self.basis(d):
            img = self._dmono(m)
            cols.append(self.vector(img, d + 1) if img else {})
        return cols

    def mul(self, a: Element, b: Element) -> Element:
        return self.normal_form(a * b)

    def one(self):
        return self.ctx.one()

    def gen(self, name):
        return self.ctx.gen(name)

    @property
    def computable(self) -> bool:
        return True

    def __repr__(self):
        return f"CDGA({self.name!r}, {len(self.ctx)} generators, {len(self.relations)} relations)"


def attach_differential(ctx: AlgebraContext, dmap: dict, name: str = "A") -> CDGA:
    return CDGA(ctx, dmap, name=name)


def differentiate(A, e: Element) -> Element:
    return A.differentiate(e)


def quotient_complex(A: CDGA, gens) -> CDGA:
    """Quotient of A by the DG ideal generated by ``gens`` and their
    differentials.  Descent of d is validated on every ideal generator,
    which is complete: d(m*r) = d(m)*r ± m*d(r)."""
    extra = []
    for g in gens:
        if not g:
            continue
        if not g.is_homogeneous():
            raise ValidationError(f"ideal generator {g} is not homogeneous")
        extra.append(g)
        dg = A.differentiate(g)
        if dg:
            extra.append(dg)
    return CDGA(A.ctx, dict(enumerate(A.d)), relations=A.relations + tuple(extra),
                name=f"{A.name}/I")


def _embed(e: Element, ctx: AlgebraContext, offset: int) -> Element:
    return Element._raw(ctx, {tuple(i + offset for i in m): c for m, c in e.terms.items()})


def tensor(A: CDGA, B: CDGA, name: str | None = None) -> CDGA:
    """A ⊗ B: generators of A first, then those of B (renamed on clash)."""
    names = set(A.ctx.names)
    decls = [(g.name, g.degree) for g in A.ctx.gens]
    for g in B.ctx.gens:
        new = g.name
        k = 2
        while new in names:
            new = f"{g.name}_{k}"
            k += 1
        names.add(new)
        decls.append((new, g.degree))
    ctx = AlgebraContext(decls)
    off = len(A.ctx)
    dmap = {}
    for i, img in enumerate(A.d):
        dmap[i] = _embed(img, ctx, 0)
    for i, img in enumerate(B.d):
        dmap[off + i] = _embed(img, ctx, off)
    rels = [_embed(r, ctx, 0) for r in A.relations] + [_embed(r, ctx, off) for r in B.relations]
    return CDGA(ctx, dmap, relations=rels, name=name or f"{A.name}*{B.name}")


# -- finite graded algebras ----------------------------------------------


def koszul_sign(degrees, perm) -> int:
    """Sign picked up when graded elements of the given degrees are
    rearranged into the order ``perm``."""
    seq = list(perm)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j] and degrees[seq[i]] & 1 and degrees[seq[j]] & 1:
                sign = -sign
    return sign


class FiniteGradedAlgebra(GradedContext):
    """Multiplication-table algebra on a named basis.

    ``basis`` lists ``(name, degree)`` pairs; it must contain the unit
    (degree 0, called ``one`` unless ``unit`` says otherwise) and a
    fundamental class in degree ``top``.  ``table`` maps pairs of non-unit
    names to ``{name: coefficient}``; unlisted products are zero.
    """

    def __init__(self, basis, table, top: int, name: str = "H", unit: str = "one",
                 fundamental: str = "vol", repairs=(), validate: bool = True):
        super().__init__()
        self.name = name
        self.top = top
        self.unit_name = unit
        self.fundamental_name = fundamental
        names = []
        degrees = []
        seen = set()
        unit_seen = False
        for nm, deg in basis:
            if nm in seen:
                raise ValidationError(f"duplicate basis element {nm}")
            seen.add(nm)
            if nm == unit:
                if deg != 0:
                    raise ValidationError("unit must have degree 0")
                unit_seen = True
                continue
            if not 0 < deg <= top:
                raise ValidationError(f"basis element {nm} has degree {deg} outside 1..{top}")
            names.append(nm)
            degrees.append(deg)
        if not unit_seen:
            raise ValidationError(f"basis must contain the unit {unit!r}")
        if fundamental not in seen or dict(basis)[fundamental] != top:
            raise ValidationError(f"basis must contain {fundamental!r} in degree {top}")
        self.names = tuple(names)
        self.degrees = tuple(degrees)
        self.index = {nm: i for i, nm in enumerate(names)}
        self.vol_index = self.index[fundamental]
        self.table = {}
        for (a, b), val in table.items():
            i, j = self._idx(a), self._idx(b)
            if i is None or j is None:
                raise ValidationError(f"product with the unit is implicit: {a}*{b}")
            row = {}
            for k, c in val.items():
                kk = self._idx(k)
                if kk is None:
                    raise ValidationError(f"product {a}*{b} has a unit component")
                c = scalar(c)
                if c:
                    if degrees[kk] != degrees[i] + degrees[j]:
                        raise ValidationError(f"{a}*{b} has a term {k} of the wrong degree")
                    row[kk] = c
            if row:
                self.table[i, j] = row
        self.repairs = list(repairs)
        self.warnings = []
        if validate:
            self.validate()

    def _idx(self, name):
        if name == self.unit_name:
            return None
        try:
            return self.index[name]
        except KeyError:
            raise ValidationError(f"unknown basis element {name!r}") from None

    # -- context protocol -------------------------------------------------

    def _enumerate(self, d):
        if d == 0:
            return [()]
        return [(i,) for i, g in enumerate(self.degrees) if g == d]

    def monomial_degree(self, m):
        return self.degrees[m[0]] if m else 0

    def mul_monomials(self, m1, m2):
        if not m1:
            return ((m2, 1),)
        if not m2:
            return ((m1, 1),)
        row = self.table.get((m1[0], m2[0]))
        if not row:
            return ()
        return tuple(((k,), c) for k, c in row.items())

    def format_monomial(self, m):
        return self.names[m[0]] if m else "1"

    def __eq__(self, other):
        return self is other

    __hash__ = object.__hash__

    # -- algebra ------------------------------------------------------------

    def element(self, name: str) -> Element:
        if name == self.unit_name:
            return self.one()
        return Element._raw(self, {(self.index[name],): Fraction(1)})

    gen = element

    @property
    def vol(self) -> Element:
        return self.element(self.fundamental_name)

    def product(self, a: str, b: str) -> Element:
        return self.element(a) * self.element(b)

    def pair(self, a: Element, b: Element) -> Fraction:
        """Coefficient of the fundamental class in a*b."""
        return (a * b).coefficient((self.vol_index,))

    def betti(self, d: int) -> int:
        return self.dim(d)

    def betti_vector(self) -> list:
        return [self.dim(d) for d in range(self.top + 1)]

    # CDGA protocol with zero differential
    relations = ()

    def differentiate(self, e):
        return self.zero()

    def normal_form(self, e):
        return e

    def dcolumns(self, d):
        return [{} for _ in self.basis(d)]

    def mul(self, a, b):
        return a * b

    @property
    def computable(self) -> bool:
        return True

    def validate(self):
        degs = self.degrees
        n = len(degs)
        for (i, j), row in self.table.items():
            if degs[i] + degs[j] > self.top and row:
                raise ValidationError(f"{self.names[i]}*{self.names[j]} lands above the top degree")
        for i in range(n):
            for j in range(n):
                ab = self.table.get((i, j), {})
                ba = self.table.get((j, i), {})
                s = -1 if degs[i] & 1 and degs[j] & 1 else 1
                if ab != {k: s * c for k, c in ba.items()}:
                    raise ValidationError(
                        f"not graded-commutative on {self.names[i]}, {self.names[j]}")
        for i, j, k in self.triples():
            a, b, c = (Element._raw(self, {(x,): Fraction(1)}) for x in (i, j, k))
            if (a * b) * c != a * (b * c):
                raise AssociativityContradiction(
                    f"({self.names[i]}*{self.names[j]})*{self.names[k]} != "
                    f"{self.names[i]}*({self.names[j]}*{self.names[k]})")

    def triples(self):
        """Ordered basis triples whose total degree is at most the top."""
        degs = self.degrees
        by_deg = {}
        for i, g in enumerate(degs):
            by_deg.setdefault(g, []).append(i)
        ds = sorted(by_deg)
        for d1 in ds:
            for d2 in ds:
                for d3 in ds:
                    if d1 + d2 + d3 <= self.top:
                        yield from itertools.product(by_deg[d1], by_deg[d2], by_deg[d3])

    def table_items(self):
        """Nonzero products ``(a, b, Element)`` with a <= b in basis order."""
        for (i, j), row in sorted(self.table.items()):
            if i <= j:
                yield self.names[i], self.names[j], Element._raw(
                    self, {(k,): c for k, c in row.items()})

    def __repr__(self):
        return f"FiniteGradedAlgebra({self.name!r}, betti={self.betti_vector()})"


@dataclass
class PDReport:
    top: int
    matrices: dict = field(default_factory=dict)
    ranks: dict = field(default_factory=dict)
    nondegenerate: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.nondegenerate.values())


def pairing_matrix(F: FiniteGradedAlgebra, d: int) -> MatrixQ:
    """Rows: basis of degree d; columns: basis of degree top-d."""
    rows = F.basis(d)
    cols = F.basis(F.top - d)
    M = MatrixQ(len(rows), len(cols))
    for a, ma in enumerate(rows):
        ea = Element._raw(F, {ma: Fraction(1)})
        for b, mb in enumerate(cols):
            v = F.pair(ea, Element._raw(F, {mb: Fraction(1)}))
            if v:
                M.entries[a, b] = v
    return M


def pd_check(F: FiniteGradedAlgebra) -> PDReport:
    rep = PDReport(F.top)
    for d in range(F.top + 1):
        M = pairing_matrix(F, d)
        r = rank(M)
        rep.matrices[d] = M
        rep.ranks[d] = r
        rep.nondegenerate[d] = M.rows == M.cols == r
    return rep


def presented_quotient_table(basis, relations, pairings, top: int, name: str = "H",
                             unit: str = "one", fundamental: str = "vol") -> FiniteGradedAlgebra:
    """Multiplication table from stated products, defaulting the rest to 0
    and repairing the defaults that associativity forces.

    ``relations`` is a list of ``(a, b, {name: coeff})`` and ``pairings`` a
    list of ``(a, b, scalar)`` meaning ``a*b = scalar*vol``.  Every stated
    product a*b = r fixes the top-degree values ``(a*b)*e = r*e``; a product
    that was not stated is then set to the unique element with the same
    pairings, wherever the pairing is nondegenerate.  Changes from 0 are
    returned in ``.repairs``.
    """
    names = [nm for nm, _ in basis if nm != unit]
    deg = {nm: g for nm, g in basis}
    if unit not in deg:
        raise ValidationError(f"basis must contain the unit {unit!r}")
    if deg.get(fundamental) != top:
        raise ValidationError(f"basis must contain {fundamental!r} in degree {top}")
    idx = {nm: i for i, nm in enumerate(names)}
    degs = [deg[nm] for nm in names]
    vol = idx[fundamental]

    def _i(nm):
        if nm not in idx:
            raise ValidationError(f"unknown basis element {nm!r}")
        return idx[nm]

    stated = {}

    def put(i, j, row):
        row = {k: c for k, c in row.items() if c}
        for k in row:
            if degs[k] != degs[i] + degs[j]:
                raise ValidationError(f"{names[i]}*{names[j]} has a term {names[k]} of the wrong degree")
        if i == j and degs[i] & 1 and row:
            raise AssociativityContradiction(f"{names[i]} is odd, so its square must vanish")
        s = -1 if degs[i] & 1 and degs[j] & 1 else 1
        for key, val in (((i, j), row), ((j, i), {k: s * c for k, c in row.items()})):
            if key in stated and stated[key] != val:
                raise AssociativityContradiction(
                    f"conflicting statements for {names[key[0]]}*{names[key[1]]}")
            stated[key] = val

    for a, b, val in relations:
        put(_i(a), _i(b), {_i(k): scalar(c) for k, c in val.items()})
    for a, b, c in pairings:
        i, j = _i(a), _i(b)
        if degs[i] + degs[j] != top:
            raise ValidationError(f"pairing {a}*{b} does not land in degree {top}")
        put(i, j, {vol: scalar(c)})

    by_deg = {}
    for i, g in enumerate(degs):
        by_deg.setdefault(g, []).append(i)

    def pair(f, e):
        return stated.get((f, e), {}).get(vol, 0) if degs[f] + degs[e] == top else 0

    # top-degree values of ordered triples
    T = {}
    for (i, j), row in list(stated.items()):
        k = degs[i] + degs[j]
        if k >= top or not row:
            continue
        for e in by_deg.get(top - k, ()):
            val = sum((c * pair(f, e) for f, c in row.items()), Fraction(0))
            trip = (i, j, e)
            tdeg = {t: degs[t] for t in trip}
            for perm in itertools.permutations(range(3)):
                key = tuple(trip[p] for p in perm)
                s = koszul_sign([tdeg[t] for t in trip], perm)
                v = s * val
                if T.get(key, v) != v:
                    raise AssociativityContradiction(
                        "stated products disagree on " + "*".join(names[t] for t in key))
                T[key] = v

    fga_warnings = []
    solvers = {}

    def solver(k):
        if k not in solvers:
            rows = by_deg.get(k, [])
            cols = by_deg.get(top - k, [])
            ech = None
            if rows and len(rows) == len(cols):
                ech = Echelon(len(cols), track=True)
                for f in rows:
                    ech.add({c: pair(f, e) for c, e in enumerate(cols) if pair(f, e)})
                if ech.rank != len(rows):
                    ech = None
            if ech is None and rows:
                msg = f"pairing in degree {k} x {top - k} is degenerate"
                warnings.warn(msg, PairingDegenerate, stacklevel=3)
                fga_warnings.append(msg)
            solvers[k] = (ech, rows, cols)
        return solvers[k]

    table = {}
    repairs = []
    for i in range(len(names)):
        for j in range(len(names)):
            k = degs[i] + degs[j]
            given = stated.get((i, j))
            if k > top:
                if given:
                    raise ValidationError(f"{names[i]}*{names[j]} lands above degree {top}")
                continue
            if k == top or not by_deg.get(k):
                if given and k != top:
                    raise AssociativityContradiction(
                        f"{names[i]}*{names[j]} stated nonzero in an empty degree")
                row = given or {}
            else:
                ech, rows, cols = solver(k)
                if ech is None:
                    row = given or {}
                else:
                    rhs = {c: T[i, j, e] for c, e in enumerate(cols) if T.get((i, j, e))}
                    residual, combo = ech.reduce(rhs)
                    forced = {rows[t]: v for t, v in combo.items() if v}
                    if given is not None and given != forced:
                        raise AssociativityContradiction(
                            f"{names[i]}*{names[j]} is stated as {given} but forced to {forced}")
                    if given is None and forced and i <= j:
                        repairs.append((names[i], names[j], forced))
                    row = forced
            if row:
                table[names[i], names[j]] = {names[t]: c for t, c in row.items()}

    F = FiniteGradedAlgebra(basis, table, top, name=name, unit=unit, fundamental=fundamental,
                            validate=False)
    F.repairs = [(a, b, Element._raw(F, {(F.index[k],): c for k, c in
                                         ((names[t], c) for t, c in row.items())}))
                 for a, b, row in repairs]
    F.warnings = fga_warnings
    F.validate()
    return F
