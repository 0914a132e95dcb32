from fractions import Fraction
from math import comb

import pytest

from rht.errors import ContextMismatch, DuplicateName, NonPositiveDegree
from rht.graded import format_scalar, make_context, scalar


@pytest.fixture
def ctx():
    return make_context([("x", 1), ("y", 1), ("a", 2), ("b", 3)])


def test_odd_generators_anticommute(ctx):
    x, y = ctx.gen("x"), ctx.gen("y")
    assert x * y == -(y * x)
    assert (x * x).is_zero()
    assert str(y * x) == "-x*y"


def test_even_generators_commute_and_power(ctx):
    a, x = ctx.gen("a"), ctx.gen("x")
    assert a * x == x * a
    assert (a ** 3).degree == 6
    assert (a ** 0) == ctx.one()


def test_mixed_sign(ctx):
    x, b = ctx.gen("x"), ctx.gen("b")
    assert b * x == -(x * b)


def test_basis_dimensions_match_free_count():
    ctx = make_context([("x", 1), ("y", 1), ("z", 1), ("a", 2), ("c", 2)])
    # Poincare series (1+t)^3 / (1-t^2)^2
    for d in range(8):
        expected = sum(comb(3, k) * (j + 1) for k in range(4) for j in range(d + 1) if k + 2 * j == d)
        assert ctx.dim(d) == expected == ctx.free_dim(d)


def test_vector_round_trip(ctx):
    x, y, a = ctx.gen("x"), ctx.gen("y"), ctx.gen("a")
    e = x * y.scale(Fraction(3, 2)) - a
    assert ctx.from_vector(2, ctx.vector(e, 2)) == e


def test_inhomogeneous_degree_raises(ctx):
    with pytest.raises(ValueError):
        (ctx.gen("x") + ctx.gen("a")).degree


def test_bad_declarations():
    with pytest.raises(NonPositiveDegree):
        make_context([("x", 0)])
    with pytest.raises(DuplicateName):
        make_context([("x", 1), ("x", 2)])


def test_context_mismatch(ctx):
    other = make_context([("x", 1)])
    with pytest.raises(ContextMismatch):
        ctx.gen("x") + other.gen("x")


def test_scalars():
    assert scalar("-3/2") == Fraction(-3, 2)
    assert format_scalar(Fraction(-3, 2)) == "-3/2"
    assert format_scalar(Fraction(4)) == "4"
