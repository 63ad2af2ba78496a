"""Exact-rational point-set geometry.

Exponent vectors are tuples of :class:`~fractions.Fraction`. Every
affine-dependence, barycentric and hull decision in this module is made
in exact arithmetic; there are no tolerances here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from . import lpcore
from .errors import (
    DimensionMismatch,
    EnumerationCapExceeded,
    Infeasible,
    NotASimplex,
    NotInRelativeInterior,
    VertexSignViolation,
)

Point = tuple  # tuple[Fraction, ...]
Rational = Union[int, str, Fraction]

DEFAULT_ENUMERATION_CAP = 25


def parse_rational(value: Rational) -> Fraction:
    """Parse ``3``, ``"4/3"``, ``"-0.25"`` or a Fraction.

    Floats are refused: a binary float is almost never the exponent the
    user meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not exponents")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"exponents must be int, str or Fraction, got {type(value).__name__}")


def make_point(coords: Iterable[Rational]) -> Point:
    return tuple(parse_rational(c) for c in coords)


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# exact linear algebra


def _rref(rows: Sequence[Sequence[Fraction]], ncols: int):
    """Reduced row echelon form. Returns (matrix, pivot columns)."""
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        pv = M[r][c]
        M[r] = [v / pv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def _lifted_columns(points: Sequence[Point]):
    """Rows of the matrix whose j-th column is (1, p_j)."""
    n = len(points[0])
    return [[Fraction(1)] * len(points)] + [[p[d] for p in points] for d in range(n)]


def affine_rank(points: Sequence[Point]) -> int:
    """Rank of the lifted vectors (1, p); equals affine dimension + 1."""
    if not points:
        return 0
    _, piv = _rref(_lifted_columns(points), len(points))
    return len(piv)


def _solve_lifted(vertices: Sequence[Point], target: Point):
    """Solve sum lam_j (1, v_j) = (1, target). Returns None if inconsistent.
    Assumes the lifted vertices are independent (unique solution)."""
    k = len(vertices)
    rows = _lifted_columns(vertices)
    rhs = [Fraction(1)] + list(target)
    M, piv = _rref([r + [b] for r, b in zip(rows, rhs)], k + 1)
    if k in piv:
        return None
    lam = [Fraction(0)] * k
    for i, c in enumerate(piv):
        lam[c] = M[i][k]
    return tuple(lam)


def _affine_kernel(points: Sequence[Point]):
    """Basis of {mu : sum mu_j (1, p_j) = 0}."""
    m = len(points)
    M, piv = _rref(_lifted_columns(points), m)
    free = [c for c in range(m) if c not in piv]
    basis = []
    for f in free:
        mu = [Fraction(0)] * m
        mu[f] = Fraction(1)
        for i, c in enumerate(piv):
            mu[c] = -M[i][f]
        basis.append(tuple(mu))
    return basis


def _check_dims(points: Sequence[Point], dim: int | None = None):
    if dim is None and points:
        dim = len(points[0])
    for p in points:
        if len(p) != dim:
            raise DimensionMismatch(f"point {p} has length {len(p)}, expected {dim}")
    return dim


def in_closed_simplex(vertices: Sequence[Point], p: Point) -> bool:
    """Exact membership of p in conv(vertices) for affinely independent vertices."""
    lam = _solve_lifted(vertices, p)
    return lam is not None and all(v >= 0 for v in lam)


def in_convex_hull(points: Sequence[Point], p: Point) -> bool:
    """Exact membership of p in conv(points) for an arbitrary finite set."""
    if not points:
        return False
    try:
        lpcore.feasible_point(LambdaPolytope(tuple(points), p))
    except Infeasible:
        return False
    return True


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class SupportSet:
    dim: int
    points: tuple

    def __post_init__(self):
        pts = tuple(make_point(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        _check_dims(pts, self.dim)
        if len(set(pts)) != len(pts):
            raise ValueError("support set contains duplicate points")

    @classmethod
    def of(cls, points: Iterable[Iterable[Rational]], dim: int | None = None) -> "SupportSet":
        pts = [make_point(p) for p in points]
        if dim is None:
            if not pts:
                raise ValueError("cannot infer the dimension of an empty support")
            dim = len(pts[0])
        return cls(dim, tuple(pts))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def index(self, point: Point) -> int:
        return self.points.index(make_point(point))


@dataclass(frozen=True)
class SignedSupport:
    """A support set split into positive and negative index sets."""

    base: SupportSet
    positive: tuple
    negative: tuple

    def __post_init__(self):
        pos, neg = tuple(sorted(self.positive)), tuple(sorted(self.negative))
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "negative", neg)
        if set(pos) & set(neg):
            raise ValueError("positive and negative index sets overlap")
        if set(pos) | set(neg) != set(range(len(self.base))):
            raise ValueError("sign decomposition must cover every support point")
        bad = [i for i in hull_vertices(self.base) if i in set(neg)]
        if bad:
            raise VertexSignViolation(
                "hull vertices must lie in the positive part",
                [self.base[i] for i in bad],
            )

    @property
    def positive_points(self):
        return tuple(self.base[i] for i in self.positive)

    @property
    def negative_points(self):
        return tuple(self.base[i] for i in self.negative)


@dataclass(frozen=True)
class Circuit:
    """Affinely independent vertices with one point in their relative interior."""

    vertices: tuple
    inner: Point
    lam: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(make_point(v) for v in self.vertices))
        object.__setattr__(self, "inner", make_point(self.inner))
        object.__setattr__(self, "lam", tuple(Fraction(x) for x in self.lam))
        if len(self.lam) != len(self.vertices):
            raise ValueError("one barycentric coordinate per vertex required")
        if sum(self.lam) != 1 or any(x <= 0 for x in self.lam):
            raise NotInRelativeInterior("barycentric coordinates must be positive and sum to one")
        for d in range(len(self.inner)):
            if sum(l * v[d] for l, v in zip(self.lam, self.vertices)) != self.inner[d]:
                raise ValueError("barycentric coordinates do not reproduce the inner point")

    @classmethod
    def from_points(cls, vertices: Iterable[Iterable[Rational]], inner: Iterable[Rational]) -> "Circuit":
        vs = tuple(make_point(v) for v in vertices)
        b = make_point(inner)
        return cls(vs, b, barycentric_coordinates(vs, b))

    @property
    def dim(self) -> int:
        return len(self.inner)

    @property
    def is_full_dimensional(self) -> bool:
        return len(self.vertices) == self.dim + 1

    @property
    def points(self) -> tuple:
        return (*self.vertices, self.inner)


@dataclass(frozen=True)
class LambdaPolytope:
    """All convex weights on ``positive`` that reproduce ``inner``."""

    positive: tuple
    inner: Point

    def equality_system(self):
        pts = [make_point(p) for p in self.positive]
        beta = make_point(self.inner)
        rows = [[p[d] for p in pts] for d in range(len(beta))]
        rows.append([Fraction(1)] * len(pts))
        return rows, list(beta) + [Fraction(1)]

    def contains(self, lam: Sequence, tol: float = 0.0) -> bool:
        if len(lam) != len(self.positive) or any(x < -tol for x in lam):
            return False
        rows, rhs = self.equality_system()
        return all(abs(sum(a * x for a, x in zip(r, lam)) - b) <= tol for r, b in zip(rows, rhs))


# ---------------------------------------------------------------------------
# operations


def barycentric_coordinates(vertices: Sequence[Iterable[Rational]], inner: Iterable[Rational]) -> tuple:
    """Exact barycentric coordinates of ``inner`` with respect to ``vertices``.

    Raises NotASimplex for affinely dependent vertices and
    NotInRelativeInterior unless every coordinate is strictly positive.
    """
    vs = [make_point(v) for v in vertices]
    b = make_point(inner)
    if not vs:
        raise NotASimplex("no vertices given")
    _check_dims(vs + [b])
    if affine_rank(vs) != len(vs):
        raise NotASimplex("vertices are affinely dependent")
    lam = _solve_lifted(vs, b)
    if lam is None:
        raise NotInRelativeInterior("point is outside the affine hull of the vertices")
    if any(x <= 0 for x in lam):
        raise NotInRelativeInterior("point is not in the relative interior of the simplex")
    return lam


class NotACircuitReason(enum.Enum):
    AFFINELY_INDEPENDENT = "AffinelyIndependent"
    NOT_MINIMALLY_DEPENDENT = "NotMinimallyDependent"
    HULL_NOT_SIMPLEX = "HullNotSimplex"


@dataclass(frozen=True)
class Singleton:
    point: Point


@dataclass(frozen=True)
class SimplicialCircuit:
    circuit: Circuit


@dataclass(frozen=True)
class NotACircuit:
    reason: NotACircuitReason


def classify_point_set(points) -> Singleton | SimplicialCircuit | NotACircuit:
    """Decide whether a point set is a (simplicial) circuit."""
    pts = [make_point(p) for p in points]
    if not pts:
        raise ValueError("empty point set")
    _check_dims(pts)
    if len(set(pts)) != len(pts):
        raise ValueError("duplicate points")
    if len(pts) == 1:
        return Singleton(pts[0])
    kernel = _affine_kernel(pts)
    if not kernel:
        return NotACircuit(NotACircuitReason.AFFINELY_INDEPENDENT)
    if len(kernel) > 1 or any(x == 0 for x in kernel[0]):
        return NotACircuit(NotACircuitReason.NOT_MINIMALLY_DEPENDENT)
    mu = kernel[0]
    neg = [i for i, x in enumerate(mu) if x < 0]
    pos = [i for i, x in enumerate(mu) if x > 0]
    odd = neg if len(neg) == 1 else pos if len(pos) == 1 else None
    if odd is None or len(pts) < 3:
        return NotACircuit(NotACircuitReason.HULL_NOT_SIMPLEX)
    b = odd[0]
    vertices = tuple(p for i, p in enumerate(pts) if i != b)
    return SimplicialCircuit(Circuit(vertices, pts[b], barycentric_coordinates(vertices, pts[b])))


def hull_vertices(support: SupportSet | Sequence) -> tuple:
    """Indices of the vertices of conv(support), decided by exact LPs."""
    pts = list(support.points if isinstance(support, SupportSet) else map(make_point, support))
    if len(pts) <= 1:
        return tuple(range(len(pts)))
    out = []
    for i, p in enumerate(pts):
        others = pts[:i] + pts[i + 1:]
        if not in_convex_hull(others, p):
            out.append(i)
    return tuple(out)


def enumerate_circuits(
    support: SupportSet,
    *,
    minimal: bool = True,
    inner_indices: Iterable[int] | None = None,
    vertex_indices: Iterable[int] | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list:
    """All simplicial circuits ``C+ u {beta}`` drawn from ``support``.

    ``inner_indices`` restricts the candidates for beta, ``vertex_indices``
    the candidates for C+. With ``minimal=True`` a circuit is kept only if no
    other support point lies in conv(C+) apart from its vertices and beta.
    """
    pts = support.points
    if len(pts) > cap:
        raise EnumerationCapExceeded(f"support has {len(pts)} points, cap is {cap}")
    inner_idx = sorted(range(len(pts)) if inner_indices is None else set(inner_indices))
    vert_idx = sorted(range(len(pts)) if vertex_indices is None else set(vertex_indices))
    found = []

    for b in inner_idx:
        beta = pts[b]
        pool = [i for i in vert_idx if i != b]

        def extend(chosen, start):
            for pos in range(start, len(pool)):
                cand = chosen + [pool[pos]]
                verts = [pts[i] for i in cand]
                if affine_rank(verts) != len(verts):
                    continue
                lam = _solve_lifted(verts, beta) if len(verts) >= 2 else None
                if lam is not None and all(x > 0 for x in lam):
                    # beta is interior here; larger simplices cannot contain it
                    # in their relative interior
                    if not minimal or _is_minimal(pts, cand, b):
                        found.append((b, tuple(cand), Circuit(tuple(verts), beta, lam)))
                    continue
                extend(cand, pos + 1)

        extend([], 0)

    found.sort(key=lambda t: (t[0], t[1]))
    return [c for _, _, c in found]


def _is_minimal(pts, vertex_ids, inner_id):
    verts = [pts[i] for i in vertex_ids]
    skip = set(vertex_ids) | {inner_id}
    return not any(in_closed_simplex(verts, p) for i, p in enumerate(pts) if i not in skip)


def enumerate_minimal_circuits(support: SupportSet, cap: int = DEFAULT_ENUMERATION_CAP) -> list:
    """Minimal circuits of ``support`` (singletons excluded)."""
    return enumerate_circuits(support, minimal=True, cap=cap)


def circuit_indices(support: SupportSet, circuit: Circuit):
    """(vertex indices, inner index) of a circuit inside a support set."""
    return tuple(support.index(v) for v in circuit.vertices), support.index(circuit.inner)


def lambda_vertices(positive: Sequence[Point], inner: Point, cap: int = DEFAULT_ENUMERATION_CAP) -> list:
    """Vertices of the Lambda polytope, i.e. every circuit with vertices in
    ``positive`` whose relative interior contains ``inner``."""
    pts = [make_point(p) for p in positive]
    beta = make_point(inner)
    support = SupportSet(len(beta), tuple(pts) + ((beta,) if beta not in pts else ()))
    if beta in pts:
        raise ValueError("inner point must not be one of the positive points")
    return enumerate_circuits(
        support,
        minimal=False,
        inner_indices=[len(pts)],
        vertex_indices=range(len(pts)),
        cap=cap,
    )
