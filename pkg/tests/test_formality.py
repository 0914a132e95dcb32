from fractions import Fraction

import pytest

from conftest import heisenberg, sphere_even, sphere_odd, truncated_poly
from rht.cdga import CDGA, FiniteGradedAlgebra, presented_quotient_table, tensor
from rht.errors import ModelTooShallow, NotClosed, ProductsNotExact, ValidationError
from rht.formality import (
    CertificateSet, DegreeEntry, Fact, betti_zero, closed_ideal_elements, exact_monomial, exactness_certified,
    exactness_finite_target, fm_degree, ideal_component, massey_scan, pd_descent, phi_zero, s_formality,
    triple_massey, zero_product,
)
from rht.graded import make_context
from rht.minimal import SullivanModel, build_minimal_model


@pytest.mark.parametrize("n,s", [(2, 0), (3, 1), (4, 1), (5, 2), (6, 2), (7, 3), (8, 3), (9, 4)])
def test_fm_degree(n, s):
    assert fm_degree(n) == s


def test_fm_degree_rejects_small():
    with pytest.raises(ValueError):
        fm_degree(1)


def test_certificate_set_validation():
    with pytest.raises(ValidationError):
        CertificateSet([Fact("nonsense", ("x",), "r")])
    with pytest.raises(ValidationError):
        CertificateSet([phi_zero("x", "")])
    certs = CertificateSet([phi_zero("x", "r"), phi_zero("x", "r2"), zero_product("b", "a", "r"),
                            exact_monomial([("a", 1), ("a", 1), ("n", 1)], "r"), betti_zero(6, "r")])
    assert len(certs) == 4
    assert certs.counts() == {"phi-zero": 1, "zero-product": 1, "exact-monomial": 1, "betti-zero": 1}
    assert certs.family("zero-product")[0].subject == ("a", "b")
    assert certs.family("exact-monomial")[0].describe() == "a^2*n"
    assert certs.betti_zero(6) is not None and certs.betti_zero(5) is None
    assert len(certs.without("phi-zero")) == 3


def _toy():
    ctx = make_context([("a", 2), ("b", 2), ("n", 3), ("m", 3)])
    A = CDGA(ctx, {"a": 0, "b": 0, "n": ctx.gen("a") ** 2, "m": ctx.gen("a") * ctx.gen("b")})
    flags = {"a": "C", "b": "C", "n": "N", "m": "N"}
    return SullivanModel(A, {g: ctx.gen(g) for g in ctx.names}, flags, 3)


def test_certified_rewriting():
    m = _toy()
    a, b, n, mm = (m.ctx.gen(x) for x in ("a", "b", "n", "m"))
    certs = CertificateSet([phi_zero("m", "r"), zero_product("a", "b", "r"),
                            exact_monomial([("a", 2), ("n", 1)], "r")])
    z = a * a * n + a * b * n + b * mm.scale(3)
    res = exactness_certified(m, z, certs, check_closed=False)
    assert res.ok and sorted(f.family for f in res.facts) == ["exact-monomial", "phi-zero", "zero-product"]
    res = exactness_certified(m, z + b * b * n, certs, check_closed=False)
    assert not res.ok and res.element == b * b * n
    with pytest.raises(NotClosed):
        exactness_certified(m, n, certs)


def test_ideal_dimensions_on_sphere_model():
    m = build_minimal_model(truncated_poly(), 5)
    assert ideal_component(m, 5).dim == 1
    assert closed_ideal_elements(m, 5).dim == 0
    assert closed_ideal_elements(m, 4).dim == 0


def test_exactness_finite_target():
    H = SullivanModel.identity(heisenberg())
    x, y, z = (H.ctx.gen(g) for g in "xyz")
    assert exactness_finite_target(H, x * y)
    assert not exactness_finite_target(H, x * z)
    m = build_minimal_model(truncated_poly(), 5)
    assert exactness_finite_target(m, m.ctx.zero())


def test_pd_descent_degenerate_pairing():
    F = FiniteGradedAlgebra([("one", 0), ("c", 2), ("e", 5), ("vol", 7)], {}, 7, validate=False)
    ctx = make_context([("c", 2), ("e", 5)])
    A = CDGA(ctx, {"c": 0, "e": 0})
    m = SullivanModel(A, {"c": F.element("c"), "e": F.element("e")}, {"c": "C", "e": "C"}, 3,
                      target_cohomology=F)
    top = DegreeEntry(7, 0, 0, method="empty")
    res = pd_descent(m, 5, F, top)
    assert not res.discharged and "degenerate" in res.reason
    assert not pd_descent(m, 5, F, DegreeEntry(7, 1, 1)).discharged


def test_pd_descent_vacuous():
    F = truncated_poly()
    m = build_minimal_model(F, 3)
    assert pd_descent(m, 3, F, DegreeEntry(4, 0, 0, method="empty")).discharged


def test_s2_times_s3_trivially_formal():
    m = build_minimal_model(tensor(sphere_even(), sphere_odd()), 2)
    rep = s_formality(m, 5)
    assert rep.verdict == "Formal" and rep.s == 2
    assert all(e.method in ("empty", "no-closed", "betti-zero", "finite-target") for e in rep.ledger.values())


def test_model_too_shallow():
    m = build_minimal_model(truncated_poly(), 2)
    with pytest.raises(ModelTooShallow):
        s_formality(m, 8)


def test_finite_target_route_used():
    F = truncated_poly()
    m = build_minimal_model(F, 4)
    rep = s_formality(m, 4, F)
    assert rep.verdict == "Formal" and rep.exit_code == 0


def test_heisenberg_nonformal():
    rep = s_formality(SullivanModel.identity(heisenberg()), 3)
    assert rep.verdict == "NonFormal" and rep.exit_code == 1
    assert rep.witness is not None and not rep.witness.vanishes


def test_inconclusive_without_fallback():
    rep = s_formality(SullivanModel.identity(heisenberg()), 3, massey_fallback=False)
    assert rep.verdict == "Inconclusive" and rep.exit_code == 2 and rep.residuals


def test_massey_heisenberg():
    A = heisenberg()
    x, y, z = (A.gen(g) for g in "xyz")
    res = triple_massey(A, x, x, y)
    assert res.representative == x * z
    assert res.indeterminacy.dim == 0
    assert not res.vanishes
    assert res.to_dict()["vanishes"] is False


def test_massey_zero_class_vanishes():
    A = heisenberg()
    y = A.gen("y")
    res = triple_massey(A, A.ctx.zero(), y, y, degrees=(1, 1, 1))
    assert res.vanishes
    with pytest.raises(ValueError):
        triple_massey(A, A.ctx.zero(), y, y)


def test_massey_preconditions():
    A = heisenberg()
    x, y, z = (A.gen(g) for g in "xyz")
    with pytest.raises(NotClosed):
        triple_massey(A, z, x, y)
    with pytest.raises(ProductsNotExact):
        triple_massey(A, x, x * z, y)


def test_formal_targets_have_no_massey_products():
    assert massey_scan(truncated_poly(), 4) is None
    assert massey_scan(tensor(sphere_even(), sphere_odd()), 8) is None
