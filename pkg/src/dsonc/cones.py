"""Membership tests and bounds for the SONC, dual SONC and DSONC cones.

Closed-form tests (circuit number, dual circuit number) are compared with a
relative tolerance of 1e-9. Anything that goes through an LP uses 1e-7.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import lpcore
from .errors import (
    DimensionMismatch,
    Infeasible,
    InfeasibleLambda,
    NoCertificate,
    UnboundedDirection,
)
from .geometry import (
    DEFAULT_ENUMERATION_CAP,
    Circuit,
    LambdaPolytope,
    Point,
    SignedSupport,
    SimplicialCircuit,
    Singleton,
    SupportSet,
    classify_point_set,
    in_closed_simplex,
    lambda_vertices,
    make_point,
)
from .signomial import AgeFunction, CircuitFunction, Signomial, sign_decomposition

CLOSED_FORM_RTOL = 1e-9
LP_TOL = 1e-7
FW_MAX_ITER = 500
FW_GAP = 1e-8


class Verdict(enum.Enum):
    MEMBER = "Member"
    BOUNDARY = "Boundary"
    NOT_MEMBER = "NotMember"

    @property
    def in_cone(self) -> bool:
        return self is not Verdict.NOT_MEMBER


# ---------------------------------------------------------------------------
# circuit functions


def circuit_number(f: CircuitFunction) -> float:
    """prod (c_a / lam_a)^lam_a, evaluated in log space."""
    return math.exp(sum(float(l) * (math.log(c) - math.log(l)) for c, l in zip(f.positive_coeffs, f.lam)))


def dual_circuit_number(f: CircuitFunction) -> float:
    """prod c_a^lam_a, evaluated in log space."""
    return math.exp(sum(float(l) * math.log(c) for c, l in zip(f.positive_coeffs, f.lam)))


def _threshold_verdict(inner_coeff: float, threshold: float) -> Verdict:
    if inner_coeff >= 0:
        return Verdict.MEMBER
    tol = CLOSED_FORM_RTOL * max(1.0, threshold)
    if abs(-inner_coeff - threshold) <= tol:
        return Verdict.BOUNDARY
    return Verdict.MEMBER if -inner_coeff < threshold else Verdict.NOT_MEMBER


def is_sonc_circuit(f: CircuitFunction) -> Verdict:
    return _threshold_verdict(f.inner_coeff, circuit_number(f))


def is_dsonc_circuit(f: CircuitFunction) -> Verdict:
    return _threshold_verdict(f.inner_coeff, dual_circuit_number(f))


def primal_to_dual(f: CircuitFunction) -> CircuitFunction:
    """Divide every vertex coefficient by its barycentric coordinate.

    The SONC verdict of f equals the DSONC verdict of the result.
    """
    return f.with_coeffs(positive_coeffs=tuple(c / float(l) for c, l in zip(f.positive_coeffs, f.lam)))


def dual_to_primal(f: CircuitFunction) -> CircuitFunction:
    return f.with_coeffs(positive_coeffs=tuple(c * float(l) for c, l in zip(f.positive_coeffs, f.lam)))


@dataclass(frozen=True)
class DsoncWitness:
    """A shift tau with ln(|c_beta| / c_a) <= (a - beta).tau on the AGE's
    positive support. ``ell`` is set only for the constant piece of a bound."""

    inner: Point
    tau: tuple
    ell: float | None = None
    margin: float | None = None

    def check(self, g: AgeFunction, tol: float = LP_TOL) -> bool:
        tau = np.asarray(self.tau, dtype=float)
        if self.ell is not None:
            target = self.ell
        elif g.inner_coeff >= 0:
            return True
        else:
            target = math.log(-g.inner_coeff)
        beta = np.array([float(v) for v in g.inner])
        for p, c in g.positive:
            if c <= 0:
                continue
            alpha = np.array([float(v) for v in p])
            if target - math.log(c) > float((alpha - beta) @ tau) + tol * max(1.0, abs(target)):
                return False
        return True


@dataclass(frozen=True)
class CertificateReport:
    theta: float | None
    theta_check: float | None
    in_sonc: Verdict
    in_dsonc: Verdict
    boundary_dsonc: bool
    witnesses: tuple = ()


def certify_circuit(f: CircuitFunction) -> CertificateReport:
    """Everything the closed forms say about one circuit function."""
    theta = circuit_number(f)
    theta_check = dual_circuit_number(f)
    dsonc = is_dsonc_circuit(f)
    witnesses = ()
    if dsonc.in_cone and f.inner_coeff < 0:
        res = is_dsonc_age(age_of_circuit(f))
        witnesses = (res.witness,) if res.witness is not None else ()
    return CertificateReport(theta, theta_check, is_sonc_circuit(f), dsonc, dsonc is Verdict.BOUNDARY, witnesses)


def age_of_circuit(f: CircuitFunction) -> AgeFunction:
    return AgeFunction(tuple(zip(f.circuit.vertices, f.positive_coeffs)), f.circuit.inner, f.inner_coeff)


# ---------------------------------------------------------------------------
# dual SONC cone


@dataclass(frozen=True)
class CircuitCheck:
    circuit: Circuit
    lhs: float  # ln |v_beta|
    rhs: float  # sum lam_a ln v_a
    satisfied: bool


@dataclass(frozen=True)
class DualSoncResult:
    verdict: Verdict
    negative_positive_entries: tuple = ()
    checks: tuple = ()

    @property
    def violations(self) -> tuple:
        return tuple(c for c in self.checks if not c.satisfied)


def check_dual_sonc_membership(v: Sequence[float], signed: SignedSupport, cap: int = DEFAULT_ENUMERATION_CAP) -> DualSoncResult:
    """Decide whether v lies in the dual of the signed SONC cone.

    For every beta in A- the log-inequality has to hold at every vertex of
    Lambda(A+, beta); those vertices are exactly the circuits with vertices
    in A+ whose relative interior contains beta.
    """
    v = [float(x) for x in v]
    base = signed.base
    if len(v) != len(base):
        raise DimensionMismatch("one entry per support point required")
    bad = tuple(base[i] for i in signed.positive if v[i] < 0)
    if bad:
        return DualSoncResult(Verdict.NOT_MEMBER, bad)
    pos_pts = signed.positive_points
    value = {base[i]: v[i] for i in range(len(base))}
    checks = []
    for b in signed.negative:
        beta = base[b]
        vb = abs(v[b])
        for circ in lambda_vertices(pos_pts, beta, cap=cap):
            lhs = math.log(vb) if vb > 0 else -math.inf
            rhs = 0.0
            for p, l in zip(circ.vertices, circ.lam):
                va = value[p]
                rhs = -math.inf if va == 0 or rhs == -math.inf else rhs + float(l) * math.log(va)
            ok = lhs == -math.inf or lhs <= rhs + CLOSED_FORM_RTOL * max(1.0, abs(rhs) if math.isfinite(rhs) else 1.0)
            checks.append(CircuitCheck(circ, lhs, rhs, ok))
    verdict = Verdict.MEMBER if all(c.satisfied for c in checks) else Verdict.NOT_MEMBER
    return DualSoncResult(verdict, (), tuple(checks))


# ---------------------------------------------------------------------------
# AGE functions


@dataclass(frozen=True)
class AgeResult:
    verdict: Verdict
    witness: DsoncWitness | None = None
    margin: float | None = None  # ln(min_lambda prod c^lam / |c_beta|)
    diagnostic: str = ""

    @property
    def boundary(self) -> bool:
        return self.margin is not None and abs(self.margin) <= LP_TOL


def _active_terms(g: AgeFunction):
    return [(p, c) for p, c in g.positive if c > 0]


def _inner_in_hull(points, beta) -> bool:
    try:
        lpcore.feasible_point(LambdaPolytope(tuple(points), beta))
    except Infeasible:
        return False
    return True


def is_dsonc_age(g: AgeFunction) -> AgeResult:
    """LP test: find tau with ln(|c_beta|/c_a) <= (a - beta).tau for all a.

    The LP maximises a common slack t; the optimum equals
    ln(min over lambda of prod c_a^lam_a) - ln|c_beta|, so the AGE is in the
    cone iff t >= 0 (up to LP_TOL).
    """
    if g.inner_coeff >= 0:
        return AgeResult(Verdict.MEMBER, diagnostic="nonnegative inner coefficient")
    terms = _active_terms(g)
    if not terms:
        return AgeResult(Verdict.NOT_MEMBER, diagnostic="no positive terms")
    if not _inner_in_hull([p for p, _ in terms], g.inner):
        return AgeResult(Verdict.NOT_MEMBER, diagnostic="inner point outside the hull of the positive support")
    n = g.dim
    beta = np.array([float(x) for x in g.inner])
    cb = -g.inner_coeff
    rows, rhs = [], []
    for p, c in terms:
        diff = np.array([float(x) for x in p]) - beta
        rows.append(list(-diff) + [1.0])
        rhs.append(math.log(c / cb))
    out = lpcore.solve(lpcore.LinearProgram([0.0] * n + [1.0], rows, rhs))
    if out.status is not lpcore.LpStatus.OPTIMAL:
        # inner point is in the hull, so the slack is bounded and rows are feasible
        raise lpcore.NumericalBreakdown(f"unexpected LP status {out.status.value}")
    tau = tuple(float(x) for x in out.solution[:n])
    t = float(out.solution[n])
    verdict = Verdict.MEMBER if t >= -LP_TOL else Verdict.NOT_MEMBER
    return AgeResult(verdict, DsoncWitness(g.inner, tau, margin=t), t)


@dataclass(frozen=True)
class SoncAgeResult:
    verdict: Verdict
    lam: tuple | None = None
    lower: float | None = None  # achieved sum lam ln(c/lam)
    upper: float | None = None  # Frank-Wolfe duality-gap bound
    target: float | None = None  # ln |c_beta|
    iterations: int = 0
    diagnostic: str = ""


def _entropy_objective(lam, logc):
    out = 0.0
    for l, lc in zip(lam, logc):
        if l > 0:
            out += l * (lc - math.log(l))
    return out


def is_sonc_age(g: AgeFunction, max_iter: int = FW_MAX_ITER, gap_tol: float = FW_GAP) -> SoncAgeResult:
    """Maximise sum lam_a ln(c_a / lam_a) over Lambda(A+, beta) by Frank-Wolfe.

    The AGE is nonnegative iff the maximum reaches ln|c_beta|. The objective
    is concave; the vertex oracle is an LP over the Lambda polytope.
    """
    if g.inner_coeff >= 0:
        return SoncAgeResult(Verdict.MEMBER, diagnostic="nonnegative inner coefficient")
    terms = _active_terms(g)
    if not terms:
        return SoncAgeResult(Verdict.NOT_MEMBER, diagnostic="no positive terms")
    poly = LambdaPolytope(tuple(p for p, _ in terms), g.inner)
    try:
        start = lpcore.feasible_point(poly)
    except Infeasible:
        return SoncAgeResult(Verdict.NOT_MEMBER, diagnostic="inner point outside the hull of the positive support")
    rows, rhs = poly.equality_system()
    A = np.array([[float(x) for x in r] for r in rows])
    b = np.array([float(x) for x in rhs])
    logc = np.log([c for _, c in terms])
    target = math.log(-g.inner_coeff)

    lam = np.array([float(x) for x in start])
    value = _entropy_objective(lam, logc)
    upper = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        safe = np.maximum(lam, 1e-300)
        grad = logc - np.log(safe) - 1.0
        out = lpcore.solve_standard(A, b, grad)
        if out.status is not lpcore.LpStatus.OPTIMAL:
            break
        s = np.asarray(out.x, dtype=float)
        direction = s - lam
        gap = float(grad @ direction)
        upper = min(upper, value + max(gap, 0.0))
        if gap <= gap_tol or value >= target + gap_tol:
            break
        res = minimize_scalar(
            lambda gam: -_entropy_objective(lam + gam * direction, logc),
            bounds=(0.0, 1.0),
            method="bounded",
            options={"xatol": 1e-12},
        )
        gam = float(res.x)
        cand = lam + gam * direction
        cand_val = _entropy_objective(cand, logc)
        if cand_val <= value:
            # the bounded search can miss the endpoint
            end_val = _entropy_objective(s, logc)
            if end_val > value:
                cand, cand_val = s, end_val
            else:
                break
        lam, value = np.clip(cand, 0.0, None), cand_val

    tol = CLOSED_FORM_RTOL * max(1.0, abs(target))
    verdict = Verdict.MEMBER if value >= target - max(tol, gap_tol) else Verdict.NOT_MEMBER
    return SoncAgeResult(verdict, tuple(lam), value, upper, target, it)


# ---------------------------------------------------------------------------
# general signomials: split into AGE pieces


@dataclass(frozen=True)
class SplitPolicy:
    """How each positive coefficient is shared among the AGE pieces.

    ``shares`` maps a piece's inner point to a mapping from positive points
    to fractions; ``None`` means uniform shares.
    """

    shares: dict | None = None

    @classmethod
    def uniform(cls) -> "SplitPolicy":
        return cls(None)

    @classmethod
    def explicit(cls, shares: dict) -> "SplitPolicy":
        norm = {
            make_point(beta): {make_point(a): float(s) for a, s in row.items()}
            for beta, row in shares.items()
        }
        return cls(norm)

    @classmethod
    def from_matrix(cls, pieces: Sequence[Point], positive: Sequence[Point], matrix) -> "SplitPolicy":
        matrix = np.asarray(matrix, dtype=float)
        return cls.explicit({b: dict(zip(positive, matrix[i])) for i, b in enumerate(pieces)})

    @property
    def is_uniform(self) -> bool:
        return self.shares is None

    def allocate(self, pieces: Sequence[Point], positive: Sequence[Point]) -> np.ndarray:
        """Share matrix with one row per piece and one column per positive point."""
        if not pieces:
            return np.zeros((0, len(positive)))
        if self.shares is None:
            return np.full((len(pieces), len(positive)), 1.0 / len(pieces))
        S = np.array([[self.shares.get(make_point(b), {}).get(make_point(a), 0.0) for a in positive] for b in pieces])
        if np.any(S < 0):
            raise ValueError("split shares must be nonnegative")
        if np.any(S.sum(axis=0) > 1 + 1e-12):
            raise ValueError("split shares of a positive term exceed one")
        return S


@dataclass(frozen=True)
class GeneralResult:
    verdict: Verdict
    witnesses: tuple = ()
    failed: tuple = ()  # inner points whose piece failed
    pieces: tuple = ()  # AgeFunctions actually tested
    margins: tuple = ()


def split_into_ages(f: Signomial, split: SplitPolicy | None = None, pieces: Sequence[Point] | None = None):
    """AGE pieces of f, one per negative term, sharing the positive terms."""
    split = split or SplitPolicy.uniform()
    signed = sign_decomposition(f)
    f = f.normalized()
    pos = signed.positive_points
    neg = signed.negative_points if pieces is None else tuple(make_point(p) for p in pieces)
    S = split.allocate(neg, pos)
    coeff = {p: f.coefficient(p) for p in f.support.points}
    ages = []
    for i, beta in enumerate(neg):
        terms = tuple((a, S[i, j] * coeff[a]) for j, a in enumerate(pos) if S[i, j] > 0)
        ages.append(AgeFunction(terms, beta, coeff.get(beta, 0.0)))
    return ages, S


def is_dsonc_general(f: Signomial, split: SplitPolicy | None = None) -> GeneralResult:
    """Certify f as a sum of DSONC AGEs under the given split of its positive part.

    This is sufficient, relative to the split: a NotMember verdict means this
    split gives no certificate.
    """
    ages, _ = split_into_ages(f, split)
    if not ages:
        return GeneralResult(Verdict.MEMBER)
    results = [is_dsonc_age(g) for g in ages]
    failed = tuple(g.inner for g, r in zip(ages, results) if not r.verdict.in_cone)
    witnesses = tuple(r.witness for r in results if r.witness is not None)
    margins = tuple(r.margin for r in results)
    verdict = Verdict.NOT_MEMBER if failed else Verdict.MEMBER
    return GeneralResult(verdict, witnesses, failed, tuple(ages), margins)


def is_sonc_general(f: Signomial, split: SplitPolicy | None = None) -> GeneralResult:
    """Same split-based certificate with the SONC test on each piece."""
    ages, _ = split_into_ages(f, split)
    if not ages:
        return GeneralResult(Verdict.MEMBER)
    results = [is_sonc_age(g) for g in ages]
    failed = tuple(g.inner for g, r in zip(ages, results) if not r.verdict.in_cone)
    margins = tuple((r.lower - r.target) if r.lower is not None else None for r in results)
    return GeneralResult(Verdict.NOT_MEMBER if failed else Verdict.MEMBER, (), failed, tuple(ages), margins)


def refine_split(f: Signomial, passes: int = 50) -> SplitPolicy:
    """Heuristic coordinate descent on the split shares.

    Each pass moves share mass from the piece with the largest DSONC margin
    to the one with the smallest, keeping a move only if the total deficit
    sum(min(margin, 0)) shrinks. No optimality claim: a failure to certify
    after refinement proves nothing.
    """
    signed = sign_decomposition(f)
    pos = signed.positive_points
    neg = signed.negative_points
    if len(neg) <= 1:
        return SplitPolicy.uniform()
    S = SplitPolicy.uniform().allocate(neg, pos)

    def margins(S):
        ages, _ = split_into_ages(f, SplitPolicy.from_matrix(neg, pos, S))
        return np.array([_margin_or_floor(is_dsonc_age(g)) for g in ages])

    def deficit(m):
        return float(np.minimum(m, 0.0).sum())

    m = margins(S)
    for _ in range(passes):
        if m.min() >= -LP_TOL:
            break
        order = np.argsort(m, kind="stable")
        worst, best = int(order[0]), int(order[-1])
        improved = False
        for j in range(len(pos)):
            for frac in (1.0, 0.5, 0.25, 0.125):
                moved = frac * S[best, j]
                if moved <= 0:
                    break
                T = S.copy()
                T[best, j] -= moved
                T[worst, j] += moved
                mt = margins(T)
                if deficit(mt) > deficit(m) + 1e-12:
                    S, m, improved = T, mt, True
                    break
        if not improved:
            break
    return SplitPolicy.from_matrix(neg, pos, S)


def _margin_or_floor(r: AgeResult) -> float:
    if r.margin is not None:
        return r.margin
    # certified without an LP, or hopeless
    return 0.0 if r.verdict.in_cone else -1e6


# ---------------------------------------------------------------------------
# lower bounds


@dataclass(frozen=True)
class BoundResult:
    gamma_dsonc: float
    gamma_sonc_boosted: float | None
    split: dict  # piece inner point -> {positive point: share}
    lambda_used: tuple | None
    ell: float
    constant: float
    constant_piece: tuple  # ((point, share * coefficient), ...)
    tau: tuple
    witnesses: tuple = field(default=())


def boost_factor(lam: Sequence) -> float:
    """prod lam^-lam with 0^0 = 1."""
    return math.exp(-sum(float(l) * math.log(float(l)) for l in lam if l > 0))


def dsonc_lower_bound(f: Signomial, split: SplitPolicy | None = None) -> BoundResult:
    """Largest gamma with f - gamma DSONC relative to the split.

    The constant term is the inner point of one extra piece; with all other
    coefficients fixed the bound is a single LP in (tau, ell).
    """
    split = split or SplitPolicy.uniform()
    f = f.normalized()
    n = f.dim
    zero = (Fraction(0),) * n
    c0 = f.coefficient(zero)
    g = Signomial.from_terms([(c, p) for c, p in f.terms() if p != zero], n)
    signed = sign_decomposition(g)
    pos = signed.positive_points
    neg = signed.negative_points
    pieces = (*neg, zero)
    S = split.allocate(pieces, pos)
    coeff = {p: g.coefficient(p) for p in g.support.points}

    witnesses, failed = [], []
    for i, beta in enumerate(neg):
        age = AgeFunction(
            tuple((a, S[i, j] * coeff[a]) for j, a in enumerate(pos) if S[i, j] > 0), beta, coeff[beta]
        )
        r = is_dsonc_age(age)
        if not r.verdict.in_cone:
            failed.append(beta)
        elif r.witness is not None:
            witnesses.append(r.witness)
    if failed:
        raise NoCertificate("some negative terms cannot be certified under this split", failed)

    k = len(pieces) - 1
    piece = tuple((a, S[k, j] * coeff[a]) for j, a in enumerate(pos) if S[k, j] > 0)
    if not piece:
        raise UnboundedDirection("constant piece has no positive terms")
    rows = [[-float(x) for x in a] + [1.0] for a, _ in piece]
    rhs = [math.log(s) for _, s in piece]
    out = lpcore.solve(lpcore.LinearProgram([0.0] * n + [1.0], rows, rhs))
    if out.status is lpcore.LpStatus.UNBOUNDED:
        raise UnboundedDirection("origin is not in the convex hull of the constant piece")
    if out.status is not lpcore.LpStatus.OPTIMAL:
        raise lpcore.NumericalBreakdown(f"unexpected LP status {out.status.value}")
    ell = float(out.solution[n])
    tau = tuple(float(x) for x in out.solution[:n])
    witnesses.append(DsoncWitness(zero, tau, ell=ell))

    lam = None
    boosted = None
    try:
        lam = lpcore.feasible_point(LambdaPolytope(tuple(a for a, _ in piece), zero))
    except Infeasible:
        pass
    if lam is not None:
        boosted = c0 + boost_factor(lam) * math.exp(ell)
    split_map = {b: {a: float(S[i, j]) for j, a in enumerate(pos)} for i, b in enumerate(pieces)}
    return BoundResult(c0 + math.exp(ell), boosted, split_map, lam, ell, c0, piece, tau, tuple(witnesses))


def sonc_bound_boost(b: BoundResult, lam: Sequence) -> float:
    """c0 + prod lam^-lam * e^ell for any lam in Lambda(constant piece, 0)."""
    pts = tuple(a for a, _ in b.constant_piece)
    if len(lam) != len(pts):
        raise InfeasibleLambda(f"expected {len(pts)} weights, got {len(lam)}")
    zero = (Fraction(0),) * len(b.tau)
    exact = all(isinstance(x, (int, Fraction)) for x in lam)
    poly = LambdaPolytope(pts, zero)
    if not poly.contains([Fraction(x) for x in lam] if exact else [float(x) for x in lam], tol=0 if exact else 1e-9):
        raise InfeasibleLambda("weights do not reproduce the origin")
    return b.constant + boost_factor(lam) * math.exp(b.ell)


# ---------------------------------------------------------------------------
# extreme rays


@dataclass(frozen=True)
class ExtremeRayResult:
    extreme: bool
    kind: str | None = None  # "E1" circuit ray, "E2" monomial ray
    reason: str = ""


def is_extreme_ray(f: Signomial, ambient: SupportSet | None = None) -> ExtremeRayResult:
    """Extreme rays are positive monomials and minimal circuit functions whose
    inner coefficient equals minus the dual circuit number."""
    f = f.normalized()
    ambient = ambient or f.support
    missing = [p for p in f.support.points if p not in set(ambient.points)]
    if missing:
        raise DimensionMismatch(f"ambient support does not contain {missing}")
    if len(f.support) == 0:
        return ExtremeRayResult(False, reason="zero function")
    kind = classify_point_set(f.support.points)
    if isinstance(kind, Singleton):
        ok = f.coeffs[0] > 0
        return ExtremeRayResult(ok, "E2" if ok else None, "" if ok else "negative monomial")
    if not isinstance(kind, SimplicialCircuit):
        return ExtremeRayResult(False, reason=f"support is not a circuit ({kind.reason.value})")
    circ = kind.circuit
    cf_pos = [f.coefficient(v) for v in circ.vertices]
    cb = f.coefficient(circ.inner)
    if any(c <= 0 for c in cf_pos) or cb >= 0:
        return ExtremeRayResult(False, reason="sign pattern of a circuit ray violated")
    others = [p for p in ambient.points if p not in set(circ.points)]
    if any(in_closed_simplex(circ.vertices, p) for p in others):
        return ExtremeRayResult(False, reason="circuit is not minimal in the ambient support")
    theta_check = dual_circuit_number(CircuitFunction(circ, cf_pos, cb))
    if abs(-cb - theta_check) <= CLOSED_FORM_RTOL * theta_check:
        return ExtremeRayResult(True, "E1")
    return ExtremeRayResult(False, reason="inner coefficient differs from minus the dual circuit number")
