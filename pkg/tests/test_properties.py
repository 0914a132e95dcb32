"""Randomized algebraic identities; every suite runs at least 1000 cases."""

import random
from collections import Counter
from fractions import Fraction

from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import filiform, heisenberg, sphere_even, sphere_odd
from rht.cdga import CDGA, quotient_complex, tensor
from rht.cohomology import class_of, cohomology, is_closed
from rht.formality import triple_massey
from rht.graded import make_context

EXAMPLES = 1000
RUNS = Counter()
PROFILE = settings(max_examples=EXAMPLES, deadline=None, derandomize=True,
                   suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])


def nilmanifold6():
    ctx = make_context([(f"e{i}", 1) for i in range(1, 7)])
    e = {i: ctx.gen(f"e{i}") for i in range(1, 7)}
    return CDGA(ctx, {"e1": 0, "e2": 0, "e3": 0, "e4": e[1] * e[2], "e5": e[1] * e[3], "e6": e[2] * e[3]},
                name="n6")


def hirsch(seed, steps=4):
    """Random minimal CDGA built by Hirsch extensions d(v) = random cocycle."""
    rnd = random.Random(seed)
    decls = [("a", 2), ("b", 2), ("x", 1)]
    dmap = {"a": 0, "b": 0, "x": 0}
    A = CDGA(make_context(decls), dmap)
    for k in range(steps):
        deg = rnd.choice([2, 3, 4])
        Z = cohomology(A, deg + 1).cocycles
        img = {}
        for v in Z.vectors:
            c = rnd.randint(-2, 2)
            for i, q in v.items():
                img[i] = img.get(i, 0) + c * q
        name = f"v{k}"
        ctx = make_context(decls + [(name, deg)])
        elem = A.from_vector(deg + 1, {i: q for i, q in img.items() if q})
        lift = {g: _relabel(dmap[g], ctx) for g in dmap}
        lift[name] = _relabel(elem, ctx)
        decls.append((name, deg))
        dmap = lift
        A = CDGA(ctx, dmap, name=f"hirsch{seed}")
    return A


def _relabel(e, ctx):
    if not e:
        return ctx.zero()
    from rht.graded import Element
    return Element(ctx, dict(e.terms))


def _kt():
    return tensor(heisenberg(), CDGA(make_context([("t", 1)]), {"t": 0}), name="kt")


def _effective():
    ctx = make_context([("a", 2), ("b", 2), ("n", 3), ("m", 3)])
    a, b = ctx.gen("a"), ctx.gen("b")
    A = CDGA(ctx, {"a": 0, "b": 0, "n": a * a, "m": a * b})
    return quotient_complex(A, [ctx.gen("m")])


POOL = [heisenberg(), filiform(), nilmanifold6(), _kt(), tensor(heisenberg(), heisenberg(), name="h2"),
        tensor(sphere_even(), sphere_odd()), sphere_even(), _effective(), hirsch(1), hirsch(2)]
MAX_DEG = 6


def element(draw, A, d):
    basis = A.basis(d)
    if not basis:
        return A.ctx.zero()
    picks = draw(st.lists(st.tuples(st.integers(0, len(basis) - 1), st.integers(-3, 3)), max_size=4))
    vec = {}
    for i, c in picks:
        vec[i] = vec.get(i, 0) + Fraction(c)
    return A.from_vector(d, {i: c for i, c in vec.items() if c})


@st.composite
def free_triples(draw):
    degs = draw(st.lists(st.integers(1, 4), min_size=1, max_size=5))
    ctx = make_context([(f"g{i}", g) for i, g in enumerate(degs)])
    A = CDGA(ctx, {g: 0 for g in ctx.names})
    ds = [draw(st.integers(0, 5)) for _ in range(3)]
    return ctx, [(element(draw, A, d), d) for d in ds]


@st.composite
def pool_element(draw, count=2):
    A = draw(st.sampled_from(POOL))
    out = []
    for _ in range(count):
        d = draw(st.integers(0, MAX_DEG - 1))
        out.append((element(draw, A, d), d))
    return A, out


@PROFILE
@given(free_triples())
def test_koszul_commutativity(data):
    RUNS["koszul"] += 1
    _, [(a, p), (b, q), _] = data
    assert a * b == (b * a).scale((-1) ** (p * q))


@PROFILE
@given(free_triples())
def test_associativity(data):
    RUNS["associativity"] += 1
    _, [(a, _), (b, _), (c, _)] = data
    assert (a * b) * c == a * (b * c)


@PROFILE
@given(pool_element())
def test_leibniz(data):
    RUNS["leibniz"] += 1
    A, [(a, p), (b, _)] = data
    lhs = A.differentiate(A.mul(a, b))
    rhs = A.mul(A.differentiate(a), b) + A.mul(a, A.differentiate(b)).scale((-1) ** p)
    assert A.normal_form(lhs) == A.normal_form(rhs)


@PROFILE
@given(pool_element(1))
def test_d_squared_zero(data):
    RUNS["d_squared"] += 1
    A, [(a, _)] = data
    assert A.normal_form(A.differentiate(A.differentiate(a))).is_zero()


@PROFILE
@given(pool_element(1))
def test_class_of_boundary_is_zero(data):
    RUNS["class_of_d"] += 1
    A, [(a, _)] = data
    da = A.differentiate(a)
    assert not any(class_of(A, da))


def _vanishing_pairs(A):
    """Degree pairs (p, q) where every product H^p x H^q is exact."""
    out = set()
    for p in range(1, MAX_DEG):
        for q in range(1, MAX_DEG - p + 1):
            reps_p = cohomology(A, p).representatives
            reps_q = cohomology(A, q).representatives
            if all(not any(class_of(A, A.mul(x, y))) for x in reps_p for y in reps_q):
                out.add((p, q))
    return out


MASSEY_POOL = []
for _A in POOL:
    _pairs = _vanishing_pairs(_A)
    _triples = [(p, q, r) for p in range(1, MAX_DEG) for q in range(1, MAX_DEG) for r in range(1, MAX_DEG)
                if p + q + r - 1 <= MAX_DEG and (p, q) in _pairs and (q, r) in _pairs]
    if _triples:
        MASSEY_POOL.append((_A, _triples))


def cocycle(draw, A, d):
    H = cohomology(A, d)
    coords = [draw(st.integers(-2, 2)) for _ in range(H.dim)]
    z = A.from_vector(d, H.lift(coords))
    return z + A.differentiate(element(draw, A, d - 1))


@st.composite
def massey_inputs(draw):
    A, triples = draw(st.sampled_from(MASSEY_POOL))
    p, q, r = draw(st.sampled_from(triples))
    cls = [cocycle(draw, A, k) for k in (p, q, r)]
    shifts = [A.differentiate(element(draw, A, k - 1)) for k in (p, q, r)]
    return A, (p, q, r), cls, shifts


@PROFILE
@given(massey_inputs())
def test_massey_representative_closed(data):
    RUNS["massey_closed"] += 1
    A, degs, (a, b, c), _ = data
    res = triple_massey(A, a, b, c, degrees=degs)
    assert is_closed(A, res.representative)


@PROFILE
@given(massey_inputs())
def test_massey_coboundary_invariance(data):
    RUNS["massey_invariance"] += 1
    A, degs, (a, b, c), (u, v, w) = data
    r1 = triple_massey(A, a, b, c, degrees=degs)
    r2 = triple_massey(A, a + u, b + v, c + w, degrees=degs)
    assert r1.indeterminacy.vectors == r2.indeterminacy.vectors
    diff = {i: x - y for i, (x, y) in enumerate(zip(r1.representative_class, r2.representative_class)) if x != y}
    assert r1.indeterminacy.contains(diff)
    assert r1.vanishes == r2.vanishes


SUITES = {
    "koszul": test_koszul_commutativity,
    "associativity": test_associativity,
    "leibniz": test_leibniz,
    "d_squared": test_d_squared_zero,
    "class_of_d": test_class_of_boundary_is_zero,
    "massey_closed": test_massey_representative_closed,
    "massey_invariance": test_massey_coboundary_invariance,
}


def test_pools_are_interesting():
    assert len(MASSEY_POOL) >= 4
    # at least one pool member has a nonvanishing Massey product
    from rht.formality import massey_scan
    assert any(massey_scan(A, MAX_DEG) is not None for A, _ in MASSEY_POOL)
