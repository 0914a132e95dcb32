import json
import os
from fractions import Fraction

import pytest

from conftest import DATA, data_path
from rht import fileio
from rht.cdga import CDGA, FiniteGradedAlgebra
from rht.cohomology import betti
from rht.errors import DegreeViolation, DuplicateName, ParseError, ValidationError
from rht.formality import CertificateSet, massey_scan, s_formality
from rht.graded import make_context
from rht.minimal import SullivanModel

HEIS = """cdga heisenberg
# nilpotent, three generators
gen x 1
gen y 1
gen z 1
d z = x*y
"""


def test_heisenberg_file():
    A = fileio.parse_cdga(HEIS)
    assert betti(A, 3) == [1, 2, 2, 1]
    assert A.name == "heisenberg"


def test_poly_grammar():
    ctx = make_context([("a", 2), ("x", 1), ("y", 1)])
    e = fileio.parse_poly("-3/2*a^2 + (x - y)*x + 2", ctx)
    a, x, y = ctx.gen("a"), ctx.gen("x"), ctx.gen("y")
    assert e == (a ** 2).scale(Fraction(-3, 2)) - y * x + 2
    assert fileio.parse_poly("0", ctx).is_zero()


@pytest.mark.parametrize("text,err,line", [
    ("cdga A\ngen x 1\nd x = y\n", ParseError, 3),
    ("cdga A\ngen x 2\ngen y 3\nd y = x\n", DegreeViolation, 4),
    ("cdga A\ngen x 1\ngen x 1\n", DuplicateName, 3),
    ("cdga A\ngen x 1\nd x = 3 +* x\n", ParseError, 3),
    ("cdga A\ngen x one\n", ParseError, 2),
    ("galg A\n", ParseError, 1),
])
def test_cdga_errors_carry_line(text, err, line):
    with pytest.raises(err) as info:
        fileio.parse_cdga(text)
    assert str(line) in str(info.value)


def test_parse_error_column():
    with pytest.raises(ParseError) as info:
        fileio.parse_cdga("cdga A\ngen x 1\nd x = y\n")
    assert info.value.line == 3 and info.value.column == 7


def test_odd_square_differential_is_zero():
    A = fileio.parse_cdga("cdga A\ngen x 1\ngen z 2\nd z = x*x\n")
    assert A.d[1].is_zero()


def test_galg_and_cert():
    F = fileio.parse_galg(open(data_path("cp2.galg")).read())
    assert isinstance(F, FiniteGradedAlgebra) and F.betti_vector() == [1, 0, 1, 0, 1]
    with pytest.raises(ValidationError):
        fileio.parse_galg("galg F\ndim 2\nbasis one 0\nbasis vol 2\nmul vol vol = vol\n")
    certs = fileio.parse_cert('cert c\nphi-zero x ref "a \\"q\\" b"\nbetti-zero 6 ref "r"\n')
    assert [f.ref for f in certs] == ['a "q" b', "r"]
    assert fileio.parse_cert(fileio.print_cert(certs)).counts() == certs.counts()


@pytest.mark.parametrize("name", sorted(os.listdir(DATA)))
def test_print_parse_identity_on_corpus(name):
    text = open(data_path(name)).read()
    obj = fileio.load(data_path(name))
    printer = {CDGA: fileio.print_cdga, FiniteGradedAlgebra: fileio.print_galg,
               CertificateSet: fileio.print_cert}[type(obj)]
    assert printer(obj) == text


def test_annotated_model_file():
    A = fileio.load(data_path("joyce_model.cdga"))
    assert A.annotations.through == 3
    F = fileio.load(data_path("joyce.galg"))
    m = fileio.model_from_cdga(A, F)
    assert isinstance(m, SullivanModel) and m.built_through == 3


def test_emit_report_stable_and_rational():
    A = fileio.parse_cdga(HEIS)
    rep = s_formality(SullivanModel.identity(A), 3)
    text = fileio.emit_report(rep)
    assert text == fileio.emit_report(rep)
    data = json.loads(text)
    assert list(data) == sorted(data)
    assert data["verdict"] == "NonFormal"
    rep.extra["q"] = Fraction(-3, 2)
    assert '"q": "-3/2"' in fileio.emit_report(rep)


def test_load_dispatch_and_missing(tmp_path):
    p = tmp_path / "thing.txt"
    p.write_text(HEIS)
    assert isinstance(fileio.load(str(p)), CDGA)
    with pytest.raises(FileNotFoundError):
        fileio.load(str(tmp_path / "none.cdga"))
    assert massey_scan(fileio.load(str(p)), 3) is not None
