# cython: language_level=3, boundscheck=False, wraparound=False
"""
Compiled hot kernels.  Same contract as ``rht._kernels_py``.
"""

from fractions import Fraction
from math import gcd


def monomial_mul(tuple a, tuple b, odd):
    cdef Py_ssize_t na = len(a), nb = len(b), i = 0, j = 0
    cdef long swaps = 0
    cdef long x, y
    cdef list out
    cdef long[::1] odd_after
    if na == 0:
        return 1, b
    if nb == 0:
        return 1, a
    import array
    buf = array.array('l', [0]) * (na + 1)
    odd_after = buf
    for i in range(na - 1, -1, -1):
        odd_after[i] = odd_after[i + 1] + (1 if odd[a[i]] else 0)
    out = []
    i = 0
    while i < na and j < nb:
        x = a[i]
        y = b[j]
        if x < y:
            out.append(x)
            i += 1
        elif y < x:
            if odd[y]:
                swaps += odd_after[i]
            out.append(y)
            j += 1
        else:
            if odd[x]:
                return 0, ()
            out.append(x)
            out.append(y)
            i += 1
            j += 1
    if i < na:
        out.extend(a[i:])
    if j < nb:
        out.extend(b[j:])
    return (-1 if swaps & 1 else 1), tuple(out)


cdef dict _primitive(dict row):
    cdef object g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if row[min(row)] < 0:
        g = -g
    if g != 1:
        for k in row:
            row[k] //= g
    return row


cdef dict _combine(object a, dict row, object b, dict piv):
    cdef dict out
    if a == 1:
        out = dict(row)
    else:
        out = {k: a * v for k, v in row.items()}
    for k, v in piv.items():
        w = out.get(k, 0) - b * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


cdef long _leading(dict row, long limit):
    cdef long lead = -1
    cdef long k
    for key in row:
        k = key
        if k < limit and (lead < 0 or k < lead):
            lead = k
    return lead


def reduce_row(dict row, dict pivots, long limit):
    cdef long lead
    cdef dict piv
    row = {k: v for k, v in row.items() if v}
    while row:
        lead = _leading(row, limit)
        if lead < 0:
            break
        piv = pivots.get(lead)
        if piv is None:
            break
        a = piv[lead]
        b = row[lead]
        g = gcd(a, b)
        row = _combine(a // g, row, b // g, piv)
        if row:
            row = _primitive(row)
    return row


def leading(dict row, long limit):
    return _leading(row, limit)


def echelon_insert(dict row, dict pivots, long limit):
    cdef long lead
    row = reduce_row(row, pivots, limit)
    lead = _leading(row, limit)
    if lead >= 0:
        if row[lead] < 0:
            row = {k: -v for k, v in row.items()}
        pivots[lead] = row
    return lead, row


def back_substitute(dict pivots, long limit):
    cdef list cols = sorted(pivots, reverse=True)
    cdef dict done = {}
    cdef dict row, piv, out
    cdef long c, k, target
    for c in cols:
        row = pivots[c]
        while True:
            target = -1
            for key in row:
                k = key
                if c < k < limit and k in done and (target < 0 or k < target):
                    target = k
            if target < 0:
                break
            piv = done[target]
            a = piv[target]
            b = row[target]
            g = gcd(a, b)
            row = _primitive(_combine(a // g, row, b // g, piv))
        done[c] = row
    out = {}
    for c in sorted(done):
        row = done[c]
        lead = row[c]
        out[c] = {k: Fraction(v, lead) for k, v in row.items()}
    return out
