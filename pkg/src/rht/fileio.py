"""
Line-based text formats and the JSON report.

``.cdga``::

    cdga NAME
    gen IDENT DEGREE
    d IDENT = POLY            # generators without a d line are closed
    relation POLY

    #@ through S              # model annotations (optional)
    #@ flag IDENT C|N
    #@ phi IDENT = POLY | opaque

``.galg``::

    galg NAME
    dim N
    basis IDENT DEGREE        # must include ``one 0`` and ``vol N``
    mul B1 B2 = LINCOMB       # unlisted products are 0, unless forced

``.cert``::

    cert NAME
    zero-product G1 G2 ref "..."
    phi-zero G ref "..."
    exact-monomial MONO ref "..."
    betti-zero D ref "..."

POLY is a rational combination of ``*``-products and ``^``-powers of
identifiers; parentheses are allowed.  ``#`` starts a comment except in the
``#@`` annotation form.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from rht.cdga import CDGA, FiniteGradedAlgebra, presented_quotient_table
from rht.errors import DegreeViolation, DuplicateName, ParseError, ValidationError
from rht.formality import (
    CertificateSet,
    Fact,
    FormalityReport,
    betti_zero,
    exact_monomial,
    phi_zero,
    zero_product,
)
from rht.graded import AlgebraContext, Element, format_scalar
from rht.minimal import Opaque, SullivanModel

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


# -- polynomial expressions ---------------------------------------------------


class _Poly:
    """Recursive-descent parser for POLY over a graded context."""

    def __init__(self, text, ctx, line, col0):
        self.ctx = ctx
        self.line = line
        self.toks = []
        pos = 0
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if mt is None or mt.end() == pos:
                break
            if mt.group(0).strip() == "":
                break
            kind = "num" if mt.group(1) else "id" if mt.group(2) else "op"
            val = mt.group(mt.lastindex)
            self.toks.append((kind, val, col0 + mt.start(mt.lastindex)))
            pos = mt.end()
        self.end_col = col0 + len(text) + 1
        self.i = 0

    def error(self, msg, col=None):
        if col is None:
            col = self.toks[self.i][2] if self.i < len(self.toks) else self.end_col
        raise ParseError(msg, self.line, col)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.end_col)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> Element:
        if not self.toks:
            self.error("expected an expression")
        e = self.expr()
        if self.i < len(self.toks):
            self.error(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self):
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        out = self.term().scale(sign)
        while self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
            out = out + self.term().scale(sign)
        return out

    def term(self):
        out = self.power()
        while self.peek()[1] == "*":
            self.take()
            out = out * self.power()
        return out

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val, col = self.take()
            if kind != "num" or "/" in val:
                self.error("exponent must be a nonnegative integer", col)
            base = base ** int(val)
        return base

    def atom(self):
        kind, val, col = self.take()
        if kind == "num":
            return self.ctx.one().scale(Fraction(val))
        if kind == "id":
            if val not in self.ctx.index and val != getattr(self.ctx, "unit_name", None):
                self.error(f"unknown identifier {val!r}", col)
            return self.ctx.gen(val)
        if val == "(":
            e = self.expr()
            if self.peek()[1] != ")":
                self.error("expected ')'")
            self.take()
            return e
        if val == "-":
            return -self.atom()
        self.error(f"unexpected {val!r}" if val else "unexpected end of expression", col)


def parse_poly(text: str, ctx, line: int | None = None, column: int = 1) -> Element:
    return _Poly(text, ctx, line, column).parse()


# -- line splitting -------------------------------------------------------------


@dataclass
class _Line:
    no: int
    text: str
    words: list
    annotation: bool = False

    def col(self, k: int) -> int:
        """1-based column of word ``k``."""
        pos = 0
        for idx, w in enumerate(self.words):
            pos = self.text.index(w, pos)
            if idx == k:
                return pos + 1
            pos += len(w)
        return len(self.text) + 1

    def rest_after(self, token: str):
        """Text after the first occurrence of ``token`` and its column."""
        pos = self.text.index(token) + len(token)
        return self.text[pos:], pos + 1


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("#@"):
            body = raw[raw.index("#@") + 2:]
            yield _Line(no, " " * (raw.index("#@") + 2) + body, body.split(), True)
            continue
        if "#" in raw and not _in_quotes(raw):
            raw = raw[:raw.index("#")]
        if raw.strip():
            yield _Line(no, raw, raw.split())


def _in_quotes(raw):
    q = raw.find('"')
    h = raw.find("#")
    return q != -1 and q < h


def _int(line, k, what):
    try:
        return int(line.words[k])
    except (IndexError, ValueError):
        raise ParseError(f"expected {what}", line.no, line.col(k)) from None


def _word(line, k, what):
    if k >= len(line.words):
        raise ParseError(f"expected {what}", line.no, line.col(k))
    return line.words[k]


def _header(lines, keyword):
    if not lines or lines[0].annotation or lines[0].words[0] != keyword:
        no = lines[0].no if lines else 1
        raise ParseError(f"file must start with '{keyword} NAME'", no, 1)
    return _word(lines[0], 1, "a name")


def _wrap(err, line):
    if isinstance(err, ParseError):
        return err
    e = type(err)(f"line {line.no}: {err}")
    e.line = line.no
    return e


# -- .cdga ----------------------------------------------------------------------


@dataclass
class ModelAnnotations:
    through: int | None = None
    flags: dict = field(default_factory=dict)
    phi: dict = field(default_factory=dict)  # name -> (text, line, column) or "opaque"

    def __bool__(self):
        return bool(self.flags or self.phi or self.through is not None)


def parse_cdga(text: str) -> CDGA:
    """Parse and validate a ``.cdga`` file.  Model annotations, if any, are
    kept on the result as ``.annotations``."""
    lines = list(_lines(text))
    name = _header(lines, "cdga")
    decls = []
    dlines = []
    rlines = []
    ann = ModelAnnotations()
    for line in lines[1:]:
        w = line.words
        if line.annotation:
            if not w:
                continue
            if w[0] == "through":
                ann.through = _int(line, 1, "a degree")
            elif w[0] == "flag":
                flag = _word(line, 2, "C or N")
                if flag not in ("C", "N"):
                    raise ParseError("flag must be C or N", line.no, line.col(2))
                ann.flags[_word(line, 1, "a generator")] = flag
            elif w[0] == "phi":
                g = _word(line, 1, "a generator")
                if _word(line, 2, "'='") != "=":
                    raise ParseError("expected '='", line.no, line.col(2))
                rest, col = line.rest_after("=")
                ann.phi[g] = "opaque" if rest.strip() == "opaque" else (rest, line.no, col)
            else:
                raise ParseError(f"unknown annotation {w[0]!r}", line.no, line.col(0))
            continue
        kw = w[0]
        if kw == "gen":
            if len(w) != 3:
                raise ParseError("expected 'gen IDENT DEGREE'", line.no, line.col(0))
            decls.append((w[1], _int(line, 2, "a degree"), line))
        elif kw == "d":
            if len(w) < 3 or w[2] != "=":
                raise ParseError("expected 'd IDENT = POLY'", line.no, line.col(min(2, len(w) - 1)))
            dlines.append((w[1], line))
        elif kw == "relation":
            rlines.append(line)
        else:
            raise ParseError(f"unknown keyword {kw!r}", line.no, line.col(0))
    seen = set()
    for nm, deg, line in decls:
        try:
            AlgebraContext([(nm, deg)])
            if nm in seen:
                raise DuplicateName(nm)
        except ValidationError as err:
            raise _wrap(err, line) from None
        seen.add(nm)
    ctx = AlgebraContext([(nm, deg) for nm, deg, _ in decls])
    dmap = {}
    for g, line in dlines:
        if g not in ctx.index:
            raise ParseError(f"unknown generator {g!r}", line.no, line.col(1))
        if g in dmap:
            raise ParseError(f"second d line for {g}", line.no, line.col(1))
        rest, col = line.rest_after("=")
        img = parse_poly(rest, ctx, line.no, col)
        if img:
            try:
                deg = img.degree
            except ValueError:
                raise DegreeViolation(f"line {line.no}: d({g}) = {img} is not homogeneous") from None
            if deg != ctx.degrees[ctx.index[g]] + 1:
                raise DegreeViolation(f"line {line.no}: d({g}) = {img} has degree {deg}, "
                                      f"expected {ctx.degrees[ctx.index[g]] + 1}")
        dmap[g] = img
    rels = []
    for line in rlines:
        rest, col = line.rest_after("relation")
        rels.append(parse_poly(rest, ctx, line.no, col))
    A = CDGA(ctx, dmap, relations=rels, name=name, total=False)
    for g in list(ann.flags) + list(ann.phi):
        if g not in ctx.index:
            raise ValidationError(f"annotation refers to unknown generator {g!r}")
    A.annotations = ann
    return A


def model_from_cdga(A: CDGA, target=None) -> SullivanModel:
    """Turn an annotated CDGA into a SullivanModel.  φ expressions are parsed
    in ``target`` (a FiniteGradedAlgebra or CDGA); if the target is a
    finite graded algebra, it serves as the target cohomology."""
    ann = getattr(A, "annotations", None) or ModelAnnotations()
    phi = {}
    for g in A.ctx.names:
        entry = ann.phi.get(g)
        if entry is None or entry == "opaque":
            phi[g] = Opaque(f"form {g}")
        elif target is None:
            raise ValidationError(f"phi({g}) needs a target to be read in")
        else:
            text, line, col = entry
            phi[g] = parse_poly(text, target, line, col)
    flags = dict(ann.flags)
    if not flags:
        flags = {g.name: ("N" if A.d[g.index] else "C") for g in A.ctx.gens}
    through = ann.through if ann.through is not None else max(A.ctx.degrees, default=0)
    opaque = any(isinstance(v, Opaque) for v in phi.values())
    if isinstance(target, FiniteGradedAlgebra) and opaque:
        m = SullivanModel(A, phi, flags, through, target=None, target_cohomology=target, name=A.name)
    else:
        m = SullivanModel(A, phi, flags, through, target=target, name=A.name)
    m.validate()
    return m


def print_cdga(A, model: SullivanModel | None = None) -> str:
    """Canonical text of a CDGA (or of a model, with its annotations)."""
    if isinstance(A, SullivanModel):
        A, model = A.algebra, A
    ctx = A.ctx
    ann = getattr(A, "annotations", None) if model is None else None
    out = [f"cdga {A.name}"]
    if model is not None:
        out.append(f"#@ through {model.built_through}")
    elif ann and ann.through is not None:
        out.append(f"#@ through {ann.through}")
    for g in ctx.gens:
        out.append(f"gen {g.name} {g.degree}")
    for g in ctx.gens:
        if A.d[g.index]:
            out.append(f"d {g.name} = {A.d[g.index]}")
    for r in A.relations:
        out.append(f"relation {r}")
    if model is not None:
        for g in ctx.gens:
            out.append(f"#@ flag {g.name} {model.flags[g.name]}")
        for g in ctx.gens:
            img = model.phi[g.name]
            out.append(f"#@ phi {g.name} = {'opaque' if isinstance(img, Opaque) else img}")
    elif ann:
        for g in ctx.gens:
            if g.name in ann.flags:
                out.append(f"#@ flag {g.name} {ann.flags[g.name]}")
        for g in ctx.gens:
            entry = ann.phi.get(g.name)
            if entry is not None:
                out.append(f"#@ phi {g.name} = {entry if entry == 'opaque' else entry[0].strip()}")
    return "\n".join(out) + "\n"


# -- .galg ----------------------------------------------------------------------


def parse_galg(text: str) -> FiniteGradedAlgebra:
    """Parse a ``.galg`` table.  Stated products are completed by the
    associativity repair of ``presented_quotient_table``."""
    lines = [ln for ln in _lines(text) if not ln.annotation]
    name = _header(lines, "galg")
    top = None
    basis = []
    muls = []
    for line in lines[1:]:
        w = line.words
        if w[0] == "dim":
            top = _int(line, 1, "the top degree")
        elif w[0] == "basis":
            if len(w) != 3:
                raise ParseError("expected 'basis IDENT DEGREE'", line.no, line.col(0))
            basis.append((w[1], _int(line, 2, "a degree")))
        elif w[0] == "mul":
            if len(w) < 5 or w[3] != "=":
                raise ParseError("expected 'mul B1 B2 = LINCOMB'", line.no, line.col(0))
            muls.append(line)
        else:
            raise ParseError(f"unknown keyword {w[0]!r}", line.no, line.col(0))
    if top is None:
        raise ParseError("missing 'dim N' line", lines[0].no, 1)
    names = {nm for nm, _ in basis}
    scratch = FiniteGradedAlgebra(basis, {}, top, name=name, validate=False)
    rels = []
    for line in muls:
        a, b = line.words[1], line.words[2]
        for k, x in ((1, a), (2, b)):
            if x not in names:
                raise ParseError(f"unknown basis element {x!r}", line.no, line.col(k))
        rest, col = line.rest_after("=")
        val = parse_poly(rest, scratch, line.no, col)
        row = {}
        for mono, c in val.terms.items():
            if not mono:
                raise ParseError("products must not have a unit component", line.no, col)
            row[scratch.names[mono[0]]] = c
        rels.append((a, b, row))
    return presented_quotient_table(basis, rels, [], top, name=name)


def print_galg(F: FiniteGradedAlgebra) -> str:
    out = [f"galg {F.name}", f"dim {F.top}", f"basis {F.unit_name} 0"]
    for nm, deg in zip(F.names, F.degrees):
        out.append(f"basis {nm} {deg}")
    for a, b, val in F.table_items():
        out.append(f"mul {a} {b} = {val}")
    return "\n".join(out) + "\n"


# -- .cert ----------------------------------------------------------------------

_REF = re.compile(r'ref\s+"((?:[^"\\]|\\.)*)"\s*$')


def parse_cert(text: str) -> CertificateSet:
    lines = [ln for ln in _lines(text) if not ln.annotation]
    name = _header(lines, "cert")
    facts = []
    for line in lines[1:]:
        w = line.words
        mt = _REF.search(line.text)
        if mt is None:
            raise ParseError('expected ref "..." at the end of the line', line.no, len(line.text) + 1)
        ref = mt.group(1).replace('\\"', '"').replace("\\\\", "\\")
        body = line.text[:mt.start()].split()
        kind = body[0]
        if kind == "zero-product" and len(body) == 3:
            facts.append(zero_product(body[1], body[2], ref))
        elif kind == "phi-zero" and len(body) == 2:
            facts.append(phi_zero(body[1], ref))
        elif kind == "exact-monomial" and len(body) == 2:
            facts.append(exact_monomial(_mono(body[1], line), ref))
        elif kind == "betti-zero" and len(body) == 2:
            try:
                facts.append(betti_zero(int(body[1]), ref))
            except ValueError:
                raise ParseError("expected a degree", line.no, line.col(1)) from None
        elif kind in ("zero-product", "phi-zero", "exact-monomial", "betti-zero"):
            raise ParseError(f"wrong number of arguments for {kind}", line.no, line.col(0))
        else:
            raise ParseError(f"unknown certificate family {kind!r}", line.no, line.col(0))
    try:
        return CertificateSet(facts, name=name)
    except ValidationError as err:
        raise ParseError(str(err), lines[0].no, 1) from None


def _mono(text, line):
    out = []
    for part in text.split("*"):
        mt = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(\d+))?", part)
        if mt is None:
            raise ParseError(f"bad monomial {text!r}", line.no, line.col(1))
        out.append((mt.group(1), int(mt.group(2) or 1)))
    return out


def print_cert(certs: CertificateSet) -> str:
    out = [f"cert {certs.name}"]
    for f in certs.facts:
        ref = f.ref.replace("\\", "\\\\").replace('"', '\\"')
        out.append(f'{f.family} {f.describe()} ref "{ref}"')
    return "\n".join(out) + "\n"


# -- JSON -------------------------------------------------------------------------


def _json_default(x):
    if isinstance(x, Fraction):
        return format_scalar(x)
    if isinstance(x, Element):
        return str(x)
    if isinstance(x, Fact):
        return {"family": x.family, "subject": x.describe(), "ref": x.ref}
    raise TypeError(f"cannot serialise {type(x).__name__}")


def emit_report(report) -> str:
    """Stable JSON text: sorted keys, rationals as ``"p/q"`` strings."""
    data = report.to_dict() if isinstance(report, FormalityReport) or hasattr(report, "to_dict") else report
    return json.dumps(data, sort_keys=True, indent=2, default=_json_default, ensure_ascii=False) + "\n"


def load(path: str):
    """Parse a file by extension: .cdga, .galg or .cert."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".galg"):
        return parse_galg(text)
    if path.endswith(".cert"):
        return parse_cert(text)
    if path.endswith(".cdga"):
        return parse_cdga(text)
    first = text.lstrip().split(None, 1)[:1]
    kind = first[0] if first else ""
    parser = {"cdga": parse_cdga, "galg": parse_galg, "cert": parse_cert}.get(kind)
    if parser is None:
        raise ParseError("cannot tell the file format (expected cdga, galg or cert header)", 1, 1)
    return parser(text)
