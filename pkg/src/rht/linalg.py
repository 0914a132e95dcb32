"""
Exact sparse linear algebra over Q.

Vectors are ``dict[int, Fraction]`` (column -> nonzero entry).  Elimination
runs fraction-free on primitive integer rows (see ``rht.kernels``) and is
normalised to Fractions only at the end.  Pivoting is always "first nonzero
column", so every result is deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from rht import kernels
from rht.errors import DimensionMismatch, NoSolution, NotASubspace

_SELF = 1 << 40


def to_int_row(vec: dict) -> tuple[dict, int]:
    """Scale a rational vector to a primitive-free integer row; return (row, scale)."""
    den = 1
    for v in vec.values():
        if not isinstance(v, int):
            den = lcm(den, v.denominator)
    if den == 1:
        return {k: int(v) for k, v in vec.items() if v}, 1
    return {k: int(v * den) for k, v in vec.items() if v}, den


class MatrixQ:
    """Sparse rows x cols matrix with exact rational entries."""

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionMismatch(f"entry ({r},{c}) outside {rows}x{cols}")
            v = Fraction(v)
            if v:
                self.entries[r, c] = v

    @classmethod
    def from_dense(cls, data):
        data = [list(r) for r in data]
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, {(i, j): v for i, r in enumerate(data) for j, v in enumerate(r) if v})

    @classmethod
    def from_columns(cls, rows: int, columns) -> "MatrixQ":
        columns = list(columns)
        m = cls(rows, len(columns))
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    if not 0 <= i < rows:
                        raise DimensionMismatch(f"row {i} outside {rows}")
                    m.entries[i, j] = Fraction(v)
        return m

    @classmethod
    def from_rows(cls, cols: int, rows_) -> "MatrixQ":
        rows_ = list(rows_)
        m = cls(len(rows_), cols)
        for i, row in enumerate(rows_):
            for j, v in row.items():
                if v:
                    if not 0 <= j < cols:
                        raise DimensionMismatch(f"column {j} outside {cols}")
                    m.entries[i, j] = Fraction(v)
        return m

    def row_dicts(self) -> list:
        out = [{} for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def col_dicts(self) -> list:
        out = [{} for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            out[c][r] = v
        return out

    def transpose(self) -> "MatrixQ":
        m = MatrixQ(self.cols, self.rows)
        m.entries = {(c, r): v for (r, c), v in self.entries.items()}
        return m

    def apply(self, vec: dict) -> dict:
        out = {}
        for (r, c), v in self.entries.items():
            x = vec.get(c)
            if x:
                out[r] = out.get(r, 0) + v * x
        return {k: v for k, v in out.items() if v}

    def to_dense(self) -> list:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, MatrixQ):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self):
        return f"MatrixQ({self.rows}x{self.cols}, nnz={len(self.entries)})"


class Echelon:
    """Incrementally built semi-echelon basis of a subspace of Q^dim.

    With ``track=True`` every vector passed to ``add`` is numbered in call
    order and ``reduce`` reports how a member is combined from them;
    ``add`` on a dependent vector returns the linear relation it satisfies.
    """

    def __init__(self, dim: int, track: bool = False):
        self.dim = dim
        self.track = track
        self.pivots = {}
        self.count = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, vec: dict):
        """Insert ``vec``.  Returns ``(pivot, relation)``: pivot is -1 when
        the vector was dependent, and relation (tracking only) is then the
        dependency as ``{input index: coefficient}`` summing to zero."""
        row, _ = to_int_row(vec)
        t = self.count
        self.count += 1
        if self.track:
            row[self.dim + t] = 1
        lead, rem = kernels.echelon_insert(row, self.pivots, self.dim)
        if lead >= 0 or not self.track:
            return lead, None
        return -1, {k - self.dim: Fraction(v) for k, v in rem.items()}

    def reduce(self, vec: dict):
        """Return ``(residual, combo)`` with ``vec = residual + sum(combo[t] * input_t)``.

        The residual is zero exactly when ``vec`` lies in the span.  ``combo``
        is ``None`` unless tracking.
        """
        row, den = to_int_row(vec)
        row[_SELF] = den
        rem = kernels.reduce_row(row, self.pivots, self.dim)
        alpha = rem.pop(_SELF)
        residual = {}
        combo = {} if self.track else None
        for k, v in rem.items():
            if k < self.dim:
                residual[k] = Fraction(v, alpha)
            elif self.track:
                combo[k - self.dim] = Fraction(-v, alpha)
        return residual, combo

    def contains(self, vec: dict) -> bool:
        if not vec:
            return True
        row, _ = to_int_row(vec)
        rem = kernels.reduce_row(row, self.pivots, self.dim)
        return kernels.leading(rem, self.dim) < 0

    def reduced_rows(self) -> dict:
        """Fully reduced basis rows over Fraction keyed by pivot column."""
        return kernels.back_substitute(self.pivots, self.dim)


class SubspaceBasis:
    """Basis of a subspace of Q^ambient in reduced form.

    Every row is 1 on its own pivot column and 0 on the pivots of the other
    rows.  ``order`` records whether pivots are first ("forward", the usual
    reduced row echelon form) or last ("reverse", the natural form of a
    kernel) nonzero entries; either way the basis is unique for the subspace.
    """

    def __init__(self, ambient: int, rows: dict, order: str = "forward"):
        self.ambient = ambient
        self.order = order
        self.pivots = sorted(rows)
        self._rows = rows

    @classmethod
    def span(cls, ambient: int, vectors) -> "SubspaceBasis":
        ech = Echelon(ambient)
        for v in vectors:
            for k in v:
                if not 0 <= k < ambient:
                    raise DimensionMismatch(f"coordinate {k} outside {ambient}")
            ech.add(v)
        return cls(ambient, ech.reduced_rows())

    @property
    def dim(self) -> int:
        return len(self._rows)

    def __len__(self):
        return len(self._rows)

    @property
    def vectors(self) -> list:
        return [self._rows[p] for p in self.pivots]

    def row(self, pivot: int) -> dict:
        return self._rows[pivot]

    def coordinates(self, vec: dict):
        """Coefficients of ``vec`` on the basis rows, or None if not a member."""
        res = dict(vec)
        coeff = {}
        for p in self.pivots:
            c = res.get(p)
            if not c:
                continue
            coeff[p] = c
            for k, v in self._rows[p].items():
                w = res.get(k, 0) - c * v
                if w:
                    res[k] = w
                else:
                    res.pop(k, None)
        if res:
            return None
        return coeff

    def contains(self, vec: dict) -> bool:
        return self.coordinates(vec) is not None

    def __repr__(self):
        return f"SubspaceBasis(dim={self.dim}, ambient={self.ambient})"


# -- operations ---------------------------------------------------------


def rref(M: MatrixQ):
    """Reduced row echelon form and pivot columns."""
    ech = Echelon(M.cols)
    for row in M.row_dicts():
        ech.add(row)
    rows = ech.reduced_rows()
    piv = sorted(rows)
    R = MatrixQ(M.rows, M.cols)
    for i, p in enumerate(piv):
        for c, v in rows[p].items():
            R.entries[i, c] = v
    return R, piv


def rank(M: MatrixQ) -> int:
    ech = Echelon(M.rows)
    for col in M.col_dicts():
        ech.add(col)
    return ech.rank


def kernel_of_columns(nrows: int, columns) -> SubspaceBasis:
    """Kernel of the map sending basis vector j to ``columns[j]``."""
    columns = list(columns)
    ech = Echelon(nrows, track=True)
    rels = {}
    for j, col in enumerate(columns):
        lead, rel = ech.add(col)
        if lead < 0:
            f = rel[j]
            rels[j] = {k: v / f for k, v in rel.items()}
    return SubspaceBasis(len(columns), rels, order="reverse")


def kernel(M: MatrixQ) -> SubspaceBasis:
    return kernel_of_columns(M.rows, M.col_dicts())


def image(M: MatrixQ) -> SubspaceBasis:
    return SubspaceBasis.span(M.rows, M.col_dicts())


def solve(M: MatrixQ, v: dict) -> dict:
    """Some x with Mx = v; raises NoSolution.  x is supported on the pivot
    columns of ``rref(M)``, which makes it unique."""
    for k in v:
        if not 0 <= k < M.rows:
            raise DimensionMismatch(f"right-hand side index {k} outside {M.rows}")
    ech = Echelon(M.rows, track=True)
    for col in M.col_dicts():
        ech.add(col)
    residual, combo = ech.reduce(v)
    if residual:
        raise NoSolution("right-hand side not in the column space")
    return combo


def member(S: SubspaceBasis, v: dict) -> bool:
    for k in v:
        if not 0 <= k < S.ambient:
            raise DimensionMismatch(f"coordinate {k} outside {S.ambient}")
    return S.contains(v)


def quotient_dim(A: SubspaceBasis, B: SubspaceBasis) -> int:
    if A.ambient != B.ambient:
        raise DimensionMismatch(f"ambient {A.ambient} vs {B.ambient}")
    for vec in B.vectors:
        if not A.contains(vec):
            raise NotASubspace("B is not contained in A")
    return A.dim - B.dim


def complement_reps(A: SubspaceBasis, B: SubspaceBasis) -> list:
    """Rows of A (in pivot order) that extend an echelon basis of B to one of A."""
    ech = Echelon(A.ambient)
    for vec in B.vectors:
        ech.add(vec)
    out = []
    for vec in A.vectors:
        lead, _ = ech.add(vec)
        if lead >= 0:
            out.append(vec)
    return out
