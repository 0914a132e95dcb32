"""
Degreewise cohomology of CDGAs (and of finite graded algebras, whose
differential is zero).
"""

from __future__ import annotations

from fractions import Fraction

from rht.errors import DegreeOverflow, NotClosed
from rht.graded import Element
from rht.linalg import Echelon, SubspaceBasis, complement_reps, kernel_of_columns

# Refuse components larger than this unless the caller raises the bound.
MAX_COMPONENT = 200_000


def _check_size(A, d, max_dim):
    bound = MAX_COMPONENT if max_dim is None else max_dim
    ctx = getattr(A, "ctx", None)
    for k in (d, d + 1):
        if ctx is not None:
            free = ctx.free_dim(k)
            # a quotient can be much smaller, but enumerating it starts from the free basis
            limit = bound if not A.relations else 20 * bound
            if free > limit:
                raise DegreeOverflow(f"degree {k} component of the free algebra has dimension {free} > {limit}")
        if A.dim(k) > bound:
            raise DegreeOverflow(f"degree {k} component has dimension {A.dim(k)} > {bound}")


def cocycles(A, d: int) -> SubspaceBasis:
    return kernel_of_columns(A.dim(d + 1), A.dcolumns(d))


def coboundaries(A, d: int) -> SubspaceBasis:
    if d <= 0:
        return SubspaceBasis(A.dim(d), {})
    return SubspaceBasis.span(A.dim(d), A.dcolumns(d - 1))


class CohomologyComponent:
    """H^d(A): cocycles, coboundaries and chosen representatives.

    Representatives are the first cocycle basis vectors (in pivot order)
    that are independent modulo the coboundaries.
    """

    def __init__(self, A, d: int):
        self.algebra = A
        self.degree = d
        self.cocycles = cocycles(A, d)
        self.coboundaries = coboundaries(A, d)
        self.rep_vectors = complement_reps(self.cocycles, self.coboundaries)
        self._solver = Echelon(A.dim(d), track=True)
        for v in self.coboundaries.vectors:
            self._solver.add(v)
        for v in self.rep_vectors:
            self._solver.add(v)
        self._nb = self.coboundaries.dim

    @property
    def dim(self) -> int:
        return len(self.rep_vectors)

    @property
    def representatives(self) -> list:
        return [self.algebra.from_vector(self.degree, v) for v in self.rep_vectors]

    def coordinates(self, vec: dict) -> list:
        """Class coordinates of a cocycle given as a degree-d vector."""
        residual, combo = self._solver.reduce(vec)
        if residual:
            raise NotClosed("vector is not a cocycle")
        return [combo.get(self._nb + t, Fraction(0)) for t in range(self.dim)]

    def lift(self, coords) -> dict:
        """Cocycle vector representing the class with the given coordinates."""
        out = {}
        for c, v in zip(coords, self.rep_vectors):
            if c:
                for k, x in v.items():
                    w = out.get(k, 0) + c * x
                    if w:
                        out[k] = w
                    else:
                        out.pop(k, None)
        return out


def cohomology(A, d: int, max_dim: int | None = None) -> CohomologyComponent:
    cache = A.__dict__.setdefault("_cohomology_cache", {})
    comp = cache.get(d)
    if comp is None:
        _check_size(A, d, max_dim)
        comp = CohomologyComponent(A, d)
        cache[d] = comp
    return comp


def betti(A, d_max: int, max_dim: int | None = None) -> list:
    return [cohomology(A, d, max_dim).dim for d in range(d_max + 1)]


def is_closed(A, e: Element) -> bool:
    return not A.normal_form(A.differentiate(e))


def class_of(A, e: Element) -> list:
    """Coordinates of [e] in the representative basis; zero iff e is exact."""
    if not e:
        return []
    d = e.degree
    if not is_closed(A, e):
        raise NotClosed(f"{e} is not closed")
    comp = cohomology(A, d)
    return comp.coordinates(A.vector(e, d))


def is_exact(A, e: Element) -> bool:
    return not any(class_of(A, e))


def primitive(A, e: Element) -> Element:
    """Some x with d(x) = e (e must be exact); supported on the first
    independent basis columns, so the choice is deterministic."""
    from rht.errors import NoSolution

    if not e:
        return e.ctx.zero()
    d = e.degree
    ech = Echelon(A.dim(d), track=True)
    for col in A.dcolumns(d - 1):
        ech.add(col)
    residual, combo = ech.reduce(A.vector(e, d))
    if residual:
        raise NoSolution(f"{e} is not exact")
    return A.from_vector(d - 1, combo)
