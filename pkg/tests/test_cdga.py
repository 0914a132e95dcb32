from fractions import Fraction

import pytest

from conftest import heisenberg, sphere_even, sphere_odd, truncated_poly
from rht.cdga import CDGA, FiniteGradedAlgebra, koszul_sign, pd_check, presented_quotient_table, quotient_complex, tensor
from rht.cohomology import betti
from rht.errors import (
    DegreeViolation, DifferentialDoesNotDescend, DSquaredNonzero, ValidationError,
)
from rht.graded import make_context


def test_leibniz_on_generators():
    A = heisenberg()
    x, y, z = (A.gen(n) for n in "xyz")
    assert A.differentiate(z) == x * y
    # d(x*z) = -x*d(z) = -x*x*y = 0 ; d(z*z) = 0 as z is odd
    assert A.differentiate(x * z).is_zero()
    assert A.differentiate(y * z).is_zero()


def test_validation_errors():
    ctx = make_context([("a", 2), ("b", 3)])
    a, b = ctx.gen("a"), ctx.gen("b")
    with pytest.raises(DegreeViolation):
        CDGA(ctx, {"a": 0, "b": a})
    with pytest.raises(DSquaredNonzero):
        CDGA(ctx, {"a": b, "b": a ** 2})
    with pytest.raises(ValidationError):
        CDGA(ctx, {"a": 0})
    with pytest.raises(DifferentialDoesNotDescend):
        CDGA(ctx, {"a": 0, "b": a ** 2}, relations=[b])


def test_zero_differential_from_odd_square_is_accepted():
    ctx = make_context([("x", 1), ("z", 2)])
    A = CDGA(ctx, {"x": 0, "z": ctx.gen("x") ** 2})
    assert A.d[1].is_zero()


def test_quotient_basis_and_complex():
    A = heisenberg()
    Q = quotient_complex(A, [A.gen("z")])
    assert [Q.dim(d) for d in range(4)] == [1, 2, 0, 0]
    assert betti(Q, 3) == [1, 2, 0, 0]
    x, y = Q.gen("x"), Q.gen("y")
    assert Q.normal_form(x * y).is_zero()


def test_sphere_models():
    assert betti(sphere_even(), 6) == [1, 0, 1, 0, 0, 0, 0]
    assert betti(sphere_even(4), 10) == [1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0]
    assert betti(sphere_odd(), 6) == [1, 0, 0, 1, 0, 0, 0]


def test_kunneth_to_degree_8():
    A, B = sphere_even(), sphere_odd()
    T = tensor(A, B)
    ba, bb, bt = betti(A, 8), betti(B, 8), betti(T, 8)
    assert bt == [sum(ba[i] * bb[k - i] for i in range(k + 1)) for k in range(9)]


def test_kodaira_thurston_betti():
    ctx = make_context([("t", 1)])
    KT = tensor(heisenberg(), CDGA(ctx, {"t": 0}))
    assert betti(KT, 4) == [1, 3, 4, 3, 1]


def test_koszul_sign():
    assert koszul_sign([1, 1], [1, 0]) == -1
    assert koszul_sign([2, 1], [1, 0]) == 1
    assert koszul_sign([1, 1, 1], [2, 0, 1]) == 1


def test_finite_table_algebra():
    F = truncated_poly()
    x = F.element("x")
    assert x * x == F.vol
    assert F.betti_vector() == [1, 0, 1, 0, 1]
    assert pd_check(F).ok
    assert F.pair(x, x) == 1


def test_associativity_violation_rejected():
    basis = [("one", 0), ("a", 2), ("b", 2), ("c", 2), ("p", 4), ("vol", 6)]
    with pytest.raises(ValidationError):
        FiniteGradedAlgebra(basis, {("a", "b"): {"p": 1}, ("p", "c"): {"vol": 1}}, 6)


def test_degenerate_pairing_detected():
    F = FiniteGradedAlgebra([("one", 0), ("x", 2), ("vol", 4)], {}, 4)
    rep = pd_check(F)
    assert not rep.ok and rep.nondegenerate[2] is False


def test_presented_table_repairs_forced_products():
    # S^2 x S^2 stated through its pairings only: a*a and b*b default to 0.
    F = presented_quotient_table([("one", 0), ("a", 2), ("b", 2), ("vol", 4)], [], [("a", "b", 1)], 4)
    assert F.product("a", "b") == F.vol
    assert F.product("a", "a").is_zero()
    assert pd_check(F).ok


def test_unknown_basis_name():
    with pytest.raises(ValidationError):
        presented_quotient_table([("one", 0), ("vol", 2)], [], [("q", "vol", 1)], 2)


def test_fraction_coefficients():
    F = presented_quotient_table([("one", 0), ("x", 2), ("vol", 4)], [], [("x", "x", Fraction(3, 2))], 4)
    assert F.pair(F.element("x"), F.element("x")) == Fraction(3, 2)
