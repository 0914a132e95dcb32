"""
Free graded-commutative algebras over Q.

A monomial is a sorted tuple of generator indices, a power appearing as a
repeated index: ``(0, 0, 3)`` is ``x0^2 * x3``.  The tuple stands for the
product of its factors in that order, so the Koszul sign of any reordering
is folded into the coefficient.  Odd generators never repeat.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, NamedTuple

from rht import kernels
from rht.errors import ContextMismatch, DuplicateName, NonPositiveDegree, ValidationError

Monomial = tuple

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def scalar(x) -> Fraction:
    """Coerce ``x`` (int, Fraction or a string like ``"-3/2"``) to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def format_scalar(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GeneratorDecl(NamedTuple):
    name: str
    degree: int
    index: int


class GradedContext:
    """Shared machinery for anything with a degreewise monomial basis.

    Subclasses provide ``_enumerate(d)``, ``monomial_degree``,
    ``mul_monomials`` and ``format_monomial``.
    """

    def __init__(self):
        self._bases = {}
        self._indices = {}

    def basis(self, d: int) -> list:
        b = self._bases.get(d)
        if b is None:
            b = list(self._enumerate(d)) if d >= 0 else []
            b = self._bases.setdefault(d, b)
        return b

    def basis_index(self, d: int) -> dict:
        idx = self._indices.get(d)
        if idx is None:
            idx = {m: i for i, m in enumerate(self.basis(d))}
            idx = self._indices.setdefault(d, idx)
        return idx

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def one(self) -> "Element":
        return Element(self, {(): Fraction(1)})

    def zero(self) -> "Element":
        return Element(self, {})

    def monomial(self, m: Monomial, coeff=1) -> "Element":
        return Element(self, {tuple(m): scalar(coeff)})

    def vector(self, e: "Element", d: int) -> dict:
        """Coordinates of ``e`` in ``basis(d)`` as a sparse dict."""
        if e.ctx is not self and e.ctx != self:
            raise ContextMismatch("element from another context")
        idx = self.basis_index(d)
        out = {}
        for m, c in e.terms.items():
            i = idx.get(m)
            if i is None:
                raise ValueError(f"term {self.format_monomial(m)} is not of degree {d}")
            out[i] = c
        return out

    def from_vector(self, d: int, vec) -> "Element":
        b = self.basis(d)
        if isinstance(vec, dict):
            items = vec.items()
        else:
            items = enumerate(vec)
        return Element(self, {b[i]: scalar(c) for i, c in items if c})


class AlgebraContext(GradedContext):
    """Ordered generator table of a free graded-commutative algebra."""

    def __init__(self, decls: Iterable):
        super().__init__()
        gens = []
        seen = set()
        for k, decl in enumerate(decls):
            name, degree = decl[0], decl[1]
            if not isinstance(name, str) or not IDENT.match(name):
                raise ValidationError(f"bad generator name {name!r}")
            if name in seen:
                raise DuplicateName(name)
            if not isinstance(degree, int) or degree < 1:
                raise NonPositiveDegree(f"{name} has degree {degree}")
            seen.add(name)
            gens.append(GeneratorDecl(name, degree, k))
        self.gens = tuple(gens)
        self.names = tuple(g.name for g in gens)
        self.degrees = tuple(g.degree for g in gens)
        self.odd = bytes(g.degree & 1 for g in gens)
        self.index = {g.name: g.index for g in gens}
        self._key = tuple((g.name, g.degree) for g in gens)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, AlgebraContext):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __len__(self):
        return len(self.gens)

    def __repr__(self):
        return f"AlgebraContext({len(self.gens)} generators)"

    def gen(self, name: str) -> "Element":
        return Element(self, {(self.index[name],): Fraction(1)})

    def gens_of_degree(self, d: int) -> list:
        return [g for g in self.gens if g.degree == d]

    def monomial_degree(self, m: Monomial) -> int:
        degs = self.degrees
        return sum(degs[i] for i in m)

    def mul_monomials(self, m1: Monomial, m2: Monomial):
        sign, m = kernels.monomial_mul(m1, m2, self.odd)
        if sign == 0:
            return ()
        return ((m, sign),)

    def factors(self, m: Monomial) -> list:
        """``[(index, exponent), ...]`` sorted by index."""
        out = []
        for i in m:
            if out and out[-1][0] == i:
                out[-1] = (i, out[-1][1] + 1)
            else:
                out.append((i, 1))
        return out

    def format_monomial(self, m: Monomial) -> str:
        if not m:
            return "1"
        parts = []
        for i, e in self.factors(m):
            parts.append(self.names[i] if e == 1 else f"{self.names[i]}^{e}")
        return "*".join(parts)

    def free_dim(self, d: int) -> int:
        """Dimension of the degree-d component, counted from the Poincaré
        series without enumerating monomials."""
        if d < 0:
            return 0
        series = [1] + [0] * d
        for g in self.degrees:
            if g > d:
                continue
            if g & 1:
                for k in range(d, g - 1, -1):
                    series[k] += series[k - g]
            else:
                for k in range(g, d + 1):
                    series[k] += series[k - g]
        return series[d]

    def _enumerate(self, d):
        if d == 0:
            yield ()
            return
        degs = self.degrees
        odd = self.odd
        n = len(degs)
        prefix = []

        def rec(start, remaining):
            for i in range(start, n):
                g = degs[i]
                if g > remaining:
                    continue
                prefix.append(i)
                if g == remaining:
                    yield tuple(prefix)
                else:
                    yield from rec(i + 1 if odd[i] else i, remaining - g)
                prefix.pop()

        yield from rec(0, d)


class Element:
    """Sparse Q-linear combination of monomials of one context."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: GradedContext, terms=None):
        self.ctx = ctx
        if terms:
            self.terms = {m: scalar(c) for m, c in terms.items() if c}
        else:
            self.terms = {}

    @classmethod
    def _raw(cls, ctx, terms):
        e = object.__new__(cls)
        e.ctx = ctx
        e.terms = terms
        return e

    # -- structure -------------------------------------------------------

    def degrees(self) -> set:
        md = self.ctx.monomial_degree
        return {md(m) for m in self.terms}

    @property
    def degree(self):
        """The degree of a homogeneous element; None for zero."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError(f"inhomogeneous element with degrees {sorted(ds)}")
        return ds.pop()

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(tuple(m), Fraction(0))

    # -- arithmetic ------------------------------------------------------

    def _check(self, other):
        if self.ctx is not other.ctx and self.ctx != other.ctx:
            raise ContextMismatch("elements live in different contexts")

    def _coerce(self, other):
        if isinstance(other, Element):
            self._check(other)
            return other
        return Element._raw(self.ctx, {(): scalar(other)} if other else {})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Element._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Element._raw(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, q) -> "Element":
        q = scalar(q)
        if not q:
            return Element._raw(self.ctx, {})
        return Element._raw(self.ctx, {m: q * c for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Element):
            return self.scale(other)
        self._check(other)
        mul = self.ctx.mul_monomials
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                for m, s in mul(m1, m2):
                    v = out.get(m, 0) + s * c1 * c2
                    if v:
                        out[m] = v
                    else:
                        del out[m]
        return Element._raw(self.ctx, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = self.ctx.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Element):
            if self.ctx is not other.ctx and self.ctx != other.ctx:
                return False
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self.terms
            return self.terms == {(): Fraction(other)}
        return NotImplemented

    __hash__ = None

    # -- display ---------------------------------------------------------

    def sorted_terms(self):
        md = self.ctx.monomial_degree
        return sorted(self.terms.items(), key=lambda t: (md(t[0]), t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        fmt = self.ctx.format_monomial
        out = []
        for m, c in self.sorted_terms():
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            mono = fmt(m)
            if mono == "1":
                body = format_scalar(a)
            elif a == 1:
                body = mono
            else:
                body = f"{format_scalar(a)}*{mono}"
            out.append((sign, body))
        s = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"Element({self})"


def make_context(decls) -> AlgebraContext:
    return AlgebraContext(decls)


def mul(a: Element, b: Element) -> Element:
    return a * b


def basis(ctx: GradedContext, d: int) -> list:
    return ctx.basis(d)
