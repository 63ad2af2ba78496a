"""Lattice points of simplices, maximal mediated sets and SOS tests for circuit polynomials."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cones import Verdict, is_dsonc_age, is_sonc_circuit
from .errors import BoxTooLarge, NotASimplex, PreconditionViolation
from .geometry import affine_rank, hull_vertices, in_closed_simplex, make_point
from .signomial import AgeFunction, CircuitFunction

DEFAULT_BOX_CAP = 10**6

IntPoint = tuple  # tuple[int, ...]


def _as_int_point(p) -> IntPoint:
    q = make_point(p)
    if any(x.denominator != 1 for x in q):
        raise PreconditionViolation(f"lattice point expected, got {tuple(str(x) for x in q)}")
    return tuple(int(x) for x in q)


def _is_even(p: IntPoint) -> bool:
    return all(x % 2 == 0 for x in p)


@dataclass(frozen=True)
class LatticeSimplex:
    """Integer points whose convex hull is a simplex; all of them belong to Delta*."""

    delta: tuple

    def __post_init__(self):
        pts = tuple(dict.fromkeys(_as_int_point(p) for p in self.delta))
        if not pts:
            raise ValueError("empty point set")
        if len({len(p) for p in pts}) != 1:
            raise ValueError("points of mixed dimension")
        object.__setattr__(self, "delta", pts)
        verts = self.vertices
        if affine_rank([make_point(v) for v in verts]) != len(verts):
            raise NotASimplex("the convex hull of delta is not a simplex")

    @property
    def dim(self) -> int:
        return len(self.delta[0])

    @property
    def vertices(self) -> tuple:
        return tuple(self.delta[i] for i in hull_vertices(self.delta))

    @property
    def has_even_vertices(self) -> bool:
        return all(_is_even(v) for v in self.vertices)


@dataclass(frozen=True)
class MediatedSetResult:
    lattice_points: tuple
    mediated: tuple
    iterations: int

    def __contains__(self, p) -> bool:
        return tuple(p) in set(self.mediated)


def _simplex_filter(verts: Sequence[IntPoint], cands: np.ndarray) -> np.ndarray:
    """Boolean mask of candidates inside the simplex, with integer arithmetic only.

    For a full-dimensional simplex with edge matrix E, lam' = adj(E) (p - v0)
    has to be sign(det E) times a nonnegative vector summing to at most |det E|.
    """
    v0 = np.array(verts[0], dtype=object)
    E = [[Fraction(verts[j + 1][i] - verts[0][i]) for j in range(len(verts) - 1)] for i in range(len(v0))]
    n = len(E)
    inv = _exact_inverse(E)
    det = _exact_det(E)
    adj = np.array([[int(inv[i][j] * det) for j in range(n)] for i in range(n)], dtype=np.int64)
    sgn = 1 if det > 0 else -1
    D = abs(int(det))
    lam = sgn * ((cands - np.array(verts[0], dtype=np.int64)) @ adj.T)
    return np.all(lam >= 0, axis=1) & (lam.sum(axis=1) <= D)


def _exact_inverse(E):
    n = len(E)
    A = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(E)]
    for k in range(n):
        p = next(i for i in range(k, n) if A[i][k] != 0)
        A[k], A[p] = A[p], A[k]
        piv = A[k][k]
        A[k] = [x / piv for x in A[k]]
        for i in range(n):
            if i != k and A[i][k] != 0:
                f = A[i][k]
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
    return [row[n:] for row in A]


def _exact_det(E):
    A = [row[:] for row in E]
    n = len(A)
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            A[k], A[p] = A[p], A[k]
            det = -det
        det *= A[k][k]
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            A[i] = [a - f * b for a, b in zip(A[i], A[k])]
    return det


def lattice_points_in_hull(delta: LatticeSimplex, cap: int = DEFAULT_BOX_CAP) -> tuple:
    """All integer points of conv(delta), sorted lexicographically."""
    verts = delta.vertices
    arr = np.array(verts, dtype=np.int64)
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    size = math.prod(int(h - l + 1) for l, h in zip(lo, hi))
    if size > cap:
        raise BoxTooLarge(f"bounding box holds {size} candidates, cap is {cap}")
    grids = np.meshgrid(*[np.arange(l, h + 1) for l, h in zip(lo, hi)], indexing="ij")
    cands = np.stack([g.ravel() for g in grids], axis=1)
    if len(verts) == delta.dim + 1:
        mask = _simplex_filter(verts, cands)
        keep = cands[mask]
    else:
        fverts = [make_point(v) for v in verts]
        keep = np.array([c for c in cands if in_closed_simplex(fverts, make_point(c.tolist()))], dtype=np.int64)
    return tuple(sorted(tuple(int(x) for x in p) for p in keep.reshape(-1, delta.dim)))


def _is_mediated_point(p: IntPoint, current: set) -> bool:
    twice = tuple(2 * x for x in p)
    for q in current:
        if not _is_even(q):
            continue
        r = tuple(a - b for a, b in zip(twice, q))
        if r != q and r in current and _is_even(r):
            return True
    return False


def maximal_mediated_set(delta: LatticeSimplex, cap: int = DEFAULT_BOX_CAP) -> MediatedSetResult:
    """Largest Delta-mediated subset of the lattice points of conv(delta).

    Deletes points that are not midpoints of two distinct even members until
    nothing changes; the order of deletion does not affect the result.
    """
    lattice = lattice_points_in_hull(delta, cap)
    fixed = set(delta.delta)
    current = set(lattice)
    passes = 0
    while True:
        passes += 1
        removed = False
        for p in sorted(current):
            if p in fixed:
                continue
            if not _is_mediated_point(p, current):
                current.discard(p)
                removed = True
        if not removed:
            break
    return MediatedSetResult(lattice, tuple(sorted(current)), passes)


@dataclass(frozen=True)
class SosResult:
    sos: bool
    reason: str
    mediated: MediatedSetResult | None = None


def is_sos_dsonc_circuit_poly(f: CircuitFunction) -> SosResult:
    """SOS test for a nonnegative circuit polynomial with even vertex exponents.

    Such a polynomial is SOS exactly when its inner exponent lies in the
    maximal mediated set of its vertex simplex (or it is a sum of monomial
    squares). DSONC members are in particular nonnegative.
    """
    verts = [_as_int_point(v) for v in f.circuit.vertices]
    if not all(_is_even(v) for v in verts):
        raise PreconditionViolation("vertex exponents must be even")
    beta = _as_int_point(f.circuit.inner)
    # an odd inner monomial takes both signs on R^n
    worst = f if _is_even(beta) else f.with_coeffs(inner_coeff=-abs(f.inner_coeff))
    if not is_sonc_circuit(worst).in_cone:
        raise PreconditionViolation("circuit polynomial is not nonnegative")
    if f.inner_coeff == 0 or (f.inner_coeff > 0 and _is_even(beta)):
        return SosResult(True, "sum of monomial squares")
    res = maximal_mediated_set(LatticeSimplex(tuple(verts)))
    if beta in res:
        return SosResult(True, "inner exponent lies in the maximal mediated set", res)
    return SosResult(False, "inner exponent is not in the maximal mediated set", res)


# ---------------------------------------------------------------------------
# binomial squares


def expand_squares(polys: Iterable[dict]) -> dict:
    """Exact expansion of sum_i p_i^2 for polynomials given as {exponent: coefficient}.

    Exponents are integer tuples (or ints in one variable); coefficients are
    ints or Fractions. Zero coefficients are dropped.
    """
    out: dict = {}
    for p in polys:
        items = [((e,) if isinstance(e, int) else tuple(e), Fraction(c)) for e, c in p.items()]
        for (e1, c1), (e2, c2) in itertools.product(items, repeat=2):
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return {e: c for e, c in sorted(out.items()) if c != 0}


@dataclass(frozen=True)
class BinomialSquareResult:
    dsonc: bool
    terms: tuple  # ((coefficient, exponent), ...)
    age_verdict: Verdict | None = None


def binomial_square_dsonc_check(a: float, b: float, alpha, beta) -> BinomialSquareResult:
    """(a x^alpha + b x^beta)^2 is DSONC iff it is a sum of monomial squares (ab >= 0)."""
    al, be = _as_int_point(alpha), _as_int_point(beta)
    if al == be:
        raise ValueError("alpha and beta must differ")
    a, b = float(a), float(b)
    two_a = tuple(2 * x for x in al)
    two_b = tuple(2 * x for x in be)
    mid = tuple(x + y for x, y in zip(al, be))
    terms = ((a * a, two_a), (b * b, two_b), (2 * a * b, mid))
    if a * b >= 0:
        return BinomialSquareResult(True, terms)
    g = AgeFunction(((two_a, a * a), (two_b, b * b)), mid, 2 * a * b)
    verdict = is_dsonc_age(g).verdict
    return BinomialSquareResult(verdict.in_cone, terms, verdict)
