"""
Pure-Python hot kernels: Koszul monomial merge and fraction-free sparse
row elimination over the integers.

The compiled module ``rht._kernels`` implements exactly the same functions;
``rht.kernels`` picks whichever is available.

Rows are ``dict[int, int]`` mapping column to a nonzero integer.  Rows held
in a pivot table are primitive (content 1) with a positive leading entry.
"""

from fractions import Fraction
from math import gcd


def monomial_mul(a, b, odd):
    """Product of two sorted index tuples in a free graded-commutative algebra.

    ``odd[i]`` is truthy when generator ``i`` has odd degree.  Returns
    ``(sign, merged)``; sign is 0 when an odd generator would be squared.
    """
    if not a:
        return 1, b
    if not b:
        return 1, a
    na = len(a)
    # odd_after[i] = number of odd factors in a[i:]
    odd_after = [0] * (na + 1)
    for i in range(na - 1, -1, -1):
        odd_after[i] = odd_after[i + 1] + (1 if odd[a[i]] else 0)
    out = []
    i = j = 0
    nb = len(b)
    swaps = 0
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


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        for k in row:
            row[k] //= g
    return row


def _combine(a, row, b, piv):
    # a*row - b*piv, zeros dropped
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


def reduce_row(row, pivots, limit):
    """Reduce ``row`` against ``pivots`` until its leading column below
    ``limit`` is not a pivot column (or no entry below ``limit`` remains).

    Columns at or above ``limit`` are carried along untouched as tags.
    Returns a new primitive row (possibly empty).
    """
    row = {k: v for k, v in row.items() if v}
    while row:
        lead = -1
        for k in row:
            if k < limit and (lead < 0 or k < lead):
                lead = k
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


def leading(row, limit):
    lead = -1
    for k in row:
        if k < limit and (lead < 0 or k < lead):
            lead = k
    return lead


def echelon_insert(row, pivots, limit):
    """Reduce ``row`` and, if it survives below ``limit``, add it to ``pivots``.

    Returns the new pivot column, or -1 when the row was dependent.  The
    reduced remainder is returned as the second item either way.
    """
    row = reduce_row(row, pivots, limit)
    lead = leading(row, limit)
    if lead >= 0:
        if row[lead] < 0:
            row = {k: -v for k, v in row.items()}
        pivots[lead] = row
    return lead, row


def back_substitute(pivots, limit):
    """Fully reduce a semi-echelon pivot table; return rows over Fraction
    with leading entry 1, keyed by pivot column."""
    cols = sorted(pivots, reverse=True)
    done = {}
    for c in cols:
        row = pivots[c]
        while True:
            target = -1
            for k in row:
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
