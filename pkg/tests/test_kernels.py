import importlib
import itertools
import os
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rht import _kernels_py, kernels

BACKENDS = [_kernels_py]
try:
    BACKENDS.append(importlib.import_module("rht._kernels"))
except ImportError:  # extension not built
    pass


def brute_sign(a, b, odd):
    """Sign of sorting a+b by adjacent transpositions (bubble sort)."""
    seq = list(a) + list(b)
    if any(odd[x] and seq.count(x) > 1 for x in seq):
        return 0, ()
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                if odd[seq[j]] and odd[seq[j + 1]]:
                    sign = -sign
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
    return sign, tuple(seq)


monos = st.lists(st.integers(0, 5), max_size=5).map(lambda xs: tuple(sorted(xs)))
rows = st.dictionaries(st.integers(0, 7), st.integers(-6, 6).filter(bool), max_size=6)


@pytest.mark.parametrize("K", BACKENDS, ids=lambda m: m.__name__)
@settings(max_examples=300, deadline=None)
@given(a=monos, b=monos, parity=st.lists(st.booleans(), min_size=6, max_size=6))
def test_monomial_mul_matches_bubble_sort(K, a, b, parity):
    # inputs are valid monomials: odd generators appear at most once
    a = tuple(x for k, x in enumerate(a) if not (parity[x] and x in a[:k]))
    b = tuple(x for k, x in enumerate(b) if not (parity[x] and x in b[:k]))
    assert K.monomial_mul(a, b, parity) == brute_sign(a, b, parity)


@pytest.mark.parametrize("K", BACKENDS, ids=lambda m: m.__name__)
def test_monomial_mul_units(K):
    odd = [True, True, False]
    assert K.monomial_mul((), (0, 2), odd) == (1, (0, 2))
    assert K.monomial_mul((1,), (0,), odd) == (-1, (0, 1))
    assert K.monomial_mul((0,), (0,), odd) == (0, ())
    assert K.monomial_mul((2,), (2,), odd) == (1, (2, 2))


def _echelon(K, vectors, limit):
    piv = {}
    leads = [K.echelon_insert(dict(v), piv, limit)[0] for v in vectors]
    return leads, K.back_substitute(piv, limit)


def _dense_rank(vectors, ncols):
    M = [[Fraction(v.get(c, 0)) for c in range(ncols)] for v in vectors]
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c] / M[r][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        r += 1
    return r


@settings(max_examples=300, deadline=None)
@given(vectors=st.lists(rows, max_size=8))
def test_backends_agree_on_elimination(vectors):
    results = [_echelon(K, vectors, 8) for K in BACKENDS]
    assert all(r == results[0] for r in results)
    leads, reduced = results[0]
    assert len(reduced) == _dense_rank(vectors, 8)
    for c, row in reduced.items():
        assert row[c] == 1 and min(row) == c
        # reduced: no other pivot column appears
        assert not (set(row) - {c}) & set(reduced)


@pytest.mark.parametrize("K", BACKENDS, ids=lambda m: m.__name__)
def test_tag_columns_are_carried(K):
    piv = {}
    K.echelon_insert({0: 2, 1: 4, 10: 1}, piv, 10)
    lead, rem = K.echelon_insert({0: 1, 1: 2, 11: 1}, piv, 10)
    assert lead == -1
    # the dependency is recorded in the tag columns
    assert rem in ({10: 1, 11: -2}, {10: -1, 11: 2})


@pytest.mark.parametrize("K", BACKENDS, ids=lambda m: m.__name__)
def test_reduce_row_stops_at_non_pivot(K):
    piv = {}
    K.echelon_insert({1: 3, 2: 1}, piv, 5)
    out = K.reduce_row({0: 1, 1: 1}, piv, 5)
    assert K.leading(out, 5) == 0
    assert K.leading({}, 5) == -1


def test_backend_selection_reported():
    assert kernels.BACKEND in ("compiled", "python")
    code = "import rht.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, RHT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_compiled_extension_present():
    if len(BACKENDS) == 1:
        pytest.skip("compiled extension not built in this environment")
    if os.environ.get("RHT_PURE_PYTHON"):
        pytest.skip("python backend forced")
    assert kernels.BACKEND == "compiled"


def test_exhaustive_small_signs():
    odd = [True, False, True, True]
    for a in itertools.combinations(range(4), 2):
        for b in itertools.combinations(range(4), 2):
            for K in BACKENDS:
                assert K.monomial_mul(a, b, odd) == brute_sign(a, b, odd)
