"""Exponential sums over exact-rational supports.

A :class:`Signomial` pairs a :class:`~dsonc.geometry.SupportSet` with
double-precision coefficients. :class:`CircuitFunction` and
:class:`AgeFunction` are the two structured special cases the cone tests
work with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NonNegativeInnerCoefficient,
    SingularMatrix,
    SupportMismatch,
    VertexSignViolation,
)
from .geometry import (
    Circuit,
    NotACircuit,
    Point,
    SignedSupport,
    SimplicialCircuit,
    Singleton,
    SupportSet,
    _rref,
    classify_point_set,
    format_rational,
    hull_vertices,
    make_point,
    parse_rational,
)

# coefficients this small are dropped after merging coinciding exponents
MERGE_DROP_TOL = 1e-15


@dataclass(frozen=True)
class Signomial:
    support: SupportSet
    coeffs: tuple

    def __post_init__(self):
        cs = tuple(float(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", cs)
        if len(cs) != len(self.support):
            raise DimensionMismatch("one coefficient per support point required")
        if not all(math.isfinite(c) for c in cs):
            raise ValueError("coefficients must be finite")

    @classmethod
    def from_terms(cls, terms: Iterable, dim: int | None = None, drop_below: float = 0.0) -> "Signomial":
        """Build from ``(coefficient, exponent)`` pairs, summing repeated exponents."""
        acc: dict = {}
        for c, e in terms:
            p = make_point(e)
            if not math.isfinite(float(c)):
                raise ValueError("coefficients must be finite")
            acc[p] = acc.get(p, 0.0) + float(c)
        if dim is None:
            if not acc:
                raise ValueError("cannot infer the dimension of an empty signomial")
            dim = len(next(iter(acc)))
        kept = [(p, c) for p, c in acc.items() if abs(c) > drop_below]
        return cls(SupportSet(dim, tuple(p for p, _ in kept)), tuple(c for _, c in kept))

    @classmethod
    def zero(cls, dim: int) -> "Signomial":
        return cls(SupportSet(dim, ()), ())

    @property
    def dim(self) -> int:
        return self.support.dim

    def terms(self):
        return list(zip(self.coeffs, self.support.points))

    def coefficient(self, point) -> float:
        p = make_point(point)
        try:
            return self.coeffs[self.support.points.index(p)]
        except ValueError:
            return 0.0

    def normalized(self) -> "Signomial":
        """Drop zero coefficients."""
        return Signomial.from_terms(self.terms(), self.dim)

    def __add__(self, other: "Signomial") -> "Signomial":
        if other.dim != self.dim:
            raise DimensionMismatch("cannot add signomials of different dimension")
        return Signomial.from_terms(self.terms() + other.terms(), self.dim)

    def scale(self, t: float) -> "Signomial":
        return Signomial(self.support, tuple(t * c for c in self.coeffs))

    def exponent_matrix(self) -> np.ndarray:
        return np.array([[float(v) for v in p] for p in self.support.points], dtype=float).reshape(-1, self.dim)

    def __call__(self, x) -> float:
        return evaluate(self, x)


def evaluate(f: Signomial, x) -> float:
    """Sum of c_a * exp(<x, a>) in double precision; overflow gives +-inf."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != f.dim:
        raise DimensionMismatch(f"point has length {x.shape[0]}, expected {f.dim}")
    if not f.coeffs:
        return 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.dot(np.asarray(f.coeffs), np.exp(f.exponent_matrix() @ x)))


def evaluate_many(f: Signomial, X) -> np.ndarray:
    """Vectorised evaluation at the rows of X."""
    X = np.asarray(X, dtype=float).reshape(-1, f.dim)
    if not f.coeffs:
        return np.zeros(X.shape[0])
    with np.errstate(over="ignore", invalid="ignore"):
        return np.exp(X @ f.exponent_matrix().T) @ np.asarray(f.coeffs)


def evaluate_polynomial(f: Signomial, X) -> np.ndarray:
    """Evaluate f as a polynomial, sum of c_a * x^a, at the rows of X.

    Exponents must be nonnegative integers.
    """
    E = f.exponent_matrix()
    if np.any(E < 0) or np.any(E != np.round(E)):
        raise ValueError("polynomial evaluation needs nonnegative integer exponents")
    X = np.asarray(X, dtype=float).reshape(-1, f.dim)
    if not f.coeffs:
        return np.zeros(X.shape[0])
    mons = np.prod(X[:, None, :] ** E.astype(int)[None, :, :], axis=2)
    return mons @ np.asarray(f.coeffs)


def sign_decomposition(f: Signomial) -> SignedSupport:
    """Split the support by coefficient sign; hull vertices must be positive."""
    f = f.normalized()
    pos = [i for i, c in enumerate(f.coeffs) if c > 0]
    neg = [i for i, c in enumerate(f.coeffs) if c < 0]
    bad = [i for i in hull_vertices(f.support) if f.coeffs[i] < 0]
    if bad:
        raise VertexSignViolation(
            "negative coefficient on a vertex of the Newton polytope",
            [f.support[i] for i in bad],
        )
    return SignedSupport(f.support, tuple(pos), tuple(neg))


def _rational_matrix(M, n):
    rows = [[parse_rational(v) if not isinstance(v, float) else Fraction(v) for v in r] for r in M]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise DimensionMismatch(f"transformation matrix must be {n}x{n}")
    return rows


def affine_transform(f: Signomial, M, a) -> Signomial:
    """The signomial x -> f(M x + a).

    Exponents map to M^T alpha exactly; coefficients pick up exp(<a, alpha>).
    """
    n = f.dim
    Mq = _rational_matrix(M, n)
    aq = [parse_rational(v) if not isinstance(v, float) else Fraction(v) for v in a]
    if len(aq) != n:
        raise DimensionMismatch("translation vector has the wrong length")
    _, piv = _rref(Mq, n)
    if len(piv) != n:
        raise SingularMatrix("transformation matrix is not invertible")
    terms = []
    for c, alpha in f.terms():
        new_alpha = tuple(sum(Mq[j][i] * alpha[j] for j in range(n)) for i in range(n))
        shift = float(sum(ai * al for ai, al in zip(aq, alpha)))
        terms.append((c * math.exp(shift), new_alpha))
    return Signomial.from_terms(terms, n, drop_below=MERGE_DROP_TOL)


def shift_exponents(f: Signomial, v) -> Signomial:
    """Multiply f by exp(<x, v>), i.e. translate every exponent by v."""
    vq = make_point(v)
    return Signomial.from_terms(
        [(c, tuple(x + y for x, y in zip(p, vq))) for c, p in f.terms()], f.dim
    )


def format_signomial(f: Signomial, mode: str = "exp", names: Sequence[str] | None = None) -> str:
    """Human-readable rendering; ``mode="poly"`` prints x^a instead of e^<x,a>."""
    if names is None:
        names = ["x", "y", "z"] if f.dim <= 3 else [f"x{i + 1}" for i in range(f.dim)]
    parts = []
    for c, p in f.terms():
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if mode == "poly":
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{format_rational(e)}" for i, e in enumerate(p) if e != 0
            )
        else:
            lin = " + ".join(
                names[i] if e == 1 else f"{format_rational(e)}*{names[i]}" for i, e in enumerate(p) if e != 0
            )
            mono = f"e^({lin})" if lin else ""
        coeff = f"{mag:.12g}"
        body = coeff if not mono else (mono if mag == 1 else f"{coeff}*{mono}")
        parts.append((sign, body))
    if not parts:
        return "0"
    head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return " ".join([head] + [f"{s} {b}" for s, b in parts[1:]])


# ---------------------------------------------------------------------------
# structured special cases


@dataclass(frozen=True)
class CircuitFunction:
    """Signomial supported on a simplicial circuit with positive vertex terms."""

    circuit: Circuit
    positive_coeffs: tuple
    inner_coeff: float

    def __post_init__(self):
        cs = tuple(float(c) for c in self.positive_coeffs)
        object.__setattr__(self, "positive_coeffs", cs)
        object.__setattr__(self, "inner_coeff", float(self.inner_coeff))
        if len(cs) != len(self.circuit.vertices):
            raise DimensionMismatch("one coefficient per circuit vertex required")
        if not all(c > 0 and math.isfinite(c) for c in cs):
            raise VertexSignViolation("circuit vertex coefficients must be strictly positive", self.circuit.vertices)
        if not math.isfinite(self.inner_coeff):
            raise ValueError("inner coefficient must be finite")

    @classmethod
    def of(cls, vertices, inner, positive_coeffs, inner_coeff) -> "CircuitFunction":
        return cls(Circuit.from_points(vertices, inner), positive_coeffs, inner_coeff)

    @classmethod
    def from_signomial(cls, f: Signomial) -> "CircuitFunction":
        kind = classify_point_set(f.support.points)
        if not isinstance(kind, SimplicialCircuit):
            raise SupportMismatch(f"support is not a simplicial circuit ({_describe(kind)})")
        circ = kind.circuit
        return cls(circ, tuple(f.coefficient(v) for v in circ.vertices), f.coefficient(circ.inner))

    @property
    def lam(self) -> tuple:
        return self.circuit.lam

    @property
    def dim(self) -> int:
        return self.circuit.dim

    def to_signomial(self) -> Signomial:
        return Signomial(
            SupportSet(self.dim, self.circuit.points),
            (*self.positive_coeffs, self.inner_coeff),
        )

    def with_coeffs(self, positive_coeffs=None, inner_coeff=None) -> "CircuitFunction":
        return CircuitFunction(
            self.circuit,
            self.positive_coeffs if positive_coeffs is None else positive_coeffs,
            self.inner_coeff if inner_coeff is None else inner_coeff,
        )

    def __call__(self, x) -> float:
        return evaluate(self.to_signomial(), x)


def _describe(kind) -> str:
    if isinstance(kind, Singleton):
        return "single point"
    if isinstance(kind, NotACircuit):
        return kind.reason.value
    return "circuit"


@dataclass(frozen=True)
class AgeFunction:
    """Nonnegative terms on ``positive`` plus one term of any sign at ``inner``."""

    positive: tuple  # ((point, coefficient), ...)
    inner: Point
    inner_coeff: float

    def __post_init__(self):
        pos = tuple((make_point(p), float(c)) for p, c in self.positive)
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "inner", make_point(self.inner))
        object.__setattr__(self, "inner_coeff", float(self.inner_coeff))
        if any(c < 0 or not math.isfinite(c) for _, c in pos):
            raise ValueError("AGE positive coefficients must be nonnegative")
        pts = [p for p, _ in pos]
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate positive points")
        if self.inner in set(pts):
            raise ValueError("inner point must differ from every positive point")
        for p in pts:
            if len(p) != len(self.inner):
                raise DimensionMismatch("AGE points of mixed dimension")

    @classmethod
    def from_signomial(cls, f: Signomial, inner=None) -> "AgeFunction":
        """View f as an AGE; the inner point defaults to its single negative term."""
        neg = [p for c, p in f.terms() if c < 0]
        if inner is None:
            if len(neg) != 1:
                raise SupportMismatch(f"an AGE has exactly one distinguished term, found {len(neg)} negative")
            inner = neg[0]
        inner = make_point(inner)
        if any(p != inner for p in neg):
            raise SupportMismatch("negative terms away from the inner point")
        return cls(tuple((p, c) for c, p in f.terms() if p != inner), inner, f.coefficient(inner))

    @property
    def dim(self) -> int:
        return len(self.inner)

    def to_signomial(self) -> Signomial:
        return Signomial.from_terms([(c, p) for p, c in self.positive] + [(self.inner_coeff, self.inner)], self.dim)


def hadamard_combine(f: CircuitFunction, g: CircuitFunction) -> CircuitFunction:
    """Entrywise product of two circuit functions on the same circuit, with
    the inner coefficient set to ``-c_beta * d_beta``."""
    if f.circuit.inner != g.circuit.inner or set(f.circuit.vertices) != set(g.circuit.vertices):
        raise SupportMismatch("circuit functions live on different circuits")
    if f.inner_coeff >= 0 or g.inner_coeff >= 0:
        raise NonNegativeInnerCoefficient("both inner coefficients must be strictly negative")
    d = dict(zip(g.circuit.vertices, g.positive_coeffs))
    prod = tuple(c * d[v] for c, v in zip(f.positive_coeffs, f.circuit.vertices))
    return CircuitFunction(f.circuit, prod, -(f.inner_coeff * g.inner_coeff))
