"""Shared generators and independent oracles for the test suite.

The oracles here deliberately avoid the package's own geometry and LP code:
they use sympy for exact linear algebra and plain numpy/scipy otherwise.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import sympy

from dsonc.geometry import Circuit, make_point
from dsonc.signomial import CircuitFunction, Signomial


def multiply(f: Signomial, g: Signomial) -> Signomial:
    """Product of two signomials, expanded term by term."""
    terms = []
    for (c, a), (d, b) in itertools.product(f.terms(), g.terms()):
        terms.append((c * d, tuple(x + y for x, y in zip(a, b))))
    return Signomial.from_terms(terms, f.dim)


def sig(*terms, dim=None) -> Signomial:
    """``sig((1, (0, 0)), (-3, (2, 2)))``"""
    return Signomial.from_terms(terms, dim)


def motzkin(c_inner: float, c_const: float) -> CircuitFunction:
    """x^4 y^2 + x^2 y^4 + c_const - c_inner x^2 y^2 in exponential form."""
    return CircuitFunction.of([(4, 2), (2, 4), (0, 0)], (2, 2), [1, 1, c_const], -c_inner)


# ---------------------------------------------------------------------------
# random instances


def random_simplex(rng: np.random.Generator, n: int, k: int | None = None, box: int = 4):
    """k + 1 affinely independent integer points in [-box, box]^n (k defaults to n)."""
    k = n if k is None else k
    while True:
        V = rng.integers(-box, box + 1, size=(k + 1, n))
        if np.linalg.matrix_rank((V[1:] - V[0]).astype(float)) == k:
            return [tuple(int(x) for x in v) for v in V]


def random_lambda(rng: np.random.Generator, k: int, denom: int = 12) -> tuple:
    w = rng.integers(1, denom + 1, size=k)
    total = int(w.sum())
    return tuple(Fraction(int(x), total) for x in w)


def random_circuit(rng: np.random.Generator, n: int, k: int | None = None) -> Circuit:
    verts = random_simplex(rng, n, k)
    lam = random_lambda(rng, len(verts))
    beta = tuple(sum(l * v[d] for l, v in zip(lam, verts)) for d in range(n))
    return Circuit(tuple(make_point(v) for v in verts), beta, lam)


def random_positive_coeffs(rng: np.random.Generator, k: int, spread: float = 2.0) -> tuple:
    return tuple(float(x) for x in np.exp(rng.uniform(-spread, spread, size=k)))


def dual_number_oracle(coeffs, lam) -> float:
    return math.prod(float(c) ** float(l) for c, l in zip(coeffs, lam))


def circuit_number_oracle(coeffs, lam) -> float:
    return math.prod((float(c) / float(l)) ** float(l) for c, l in zip(coeffs, lam))


def random_circuit_function(rng: np.random.Generator, n: int, ratio_range=(0.0, 2.0)) -> CircuitFunction:
    """Inner coefficient is minus a random multiple of the dual circuit number."""
    circ = random_circuit(rng, n)
    cs = random_positive_coeffs(rng, len(circ.vertices))
    theta_check = dual_number_oracle(cs, circ.lam)
    return CircuitFunction(circ, cs, -rng.uniform(*ratio_range) * theta_check)


# ---------------------------------------------------------------------------
# exact geometry oracle (sympy)


def _lifted(points):
    return sympy.Matrix([[1] * len(points)] + [[sympy.Rational(p[d]) for p in points] for d in range(len(points[0]))])


def brute_force_minimal_circuits(points) -> set:
    """Minimal simplicial circuits of ``points`` as {(frozenset(vertices), inner)}.

    Every subset is tested: a circuit has a one-dimensional affine dependency
    with no zero entry, and it is simplicial when exactly one entry has the
    minority sign.
    """
    pts = [make_point(p) for p in points]
    n = len(pts[0])
    found = set()
    for size in range(3, min(len(pts), n + 2) + 1):
        for S in itertools.combinations(range(len(pts)), size):
            sub = [pts[i] for i in S]
            ker = _lifted(sub).nullspace()
            if len(ker) != 1:
                continue
            v = list(ker[0])
            if any(x == 0 for x in v):
                continue
            pos = [i for i, x in enumerate(v) if x > 0]
            neg = [i for i, x in enumerate(v) if x < 0]
            if len(pos) == 1:
                b = pos[0]
            elif len(neg) == 1:
                b = neg[0]
            else:
                continue
            verts = [sub[i] for i in range(size) if i != b]
            inner = sub[b]
            others = [p for p in pts if p not in sub]
            if any(_in_closed_simplex_oracle(verts, p) for p in others):
                continue
            found.add((frozenset(verts), inner))
    return found


def _in_closed_simplex_oracle(verts, p) -> bool:
    M = _lifted(verts)
    rhs = sympy.Matrix([1] + [sympy.Rational(x) for x in p])
    try:
        sol, params = M.gauss_jordan_solve(rhs)
    except ValueError:
        return False
    return len(params) == 0 and all(x >= 0 for x in sol)


# ---------------------------------------------------------------------------
# LP oracle


def lp_vertex_enumeration(c, A, b):
    """max c.x s.t. A x <= b by trying every square subsystem; None if infeasible.

    Only valid for bounded feasible regions.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    best = None
    for rows in itertools.combinations(range(m), n):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        x = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ x <= b + 1e-9):
            val = float(np.dot(c, x))
            if best is None or val > best:
                best = val
    return best


# ---------------------------------------------------------------------------
# maximal mediated set oracle


def mediated_oracle(lattice, delta) -> set:
    """Union of all Delta-mediated subsets, found by checking every subset."""
    delta = set(delta)
    free = [p for p in lattice if p not in delta]

    def even(p):
        return all(x % 2 == 0 for x in p)

    def mediated(M):
        for p in M - delta:
            twice = tuple(2 * x for x in p)
            if not any(
                even(q) and (r := tuple(a - b for a, b in zip(twice, q))) != q and r in M and even(r) for q in M
            ):
                return False
        return True

    union = set(delta)
    for r in range(len(free) + 1):
        for extra in itertools.combinations(free, r):
            M = delta | set(extra)
            if mediated(M):
                union |= M
    return union


def grid_search_segment(objective, lo: float, hi: float, steps: int = 20001) -> float:
    ts = np.linspace(lo, hi, steps)
    return max(objective(t) for t in ts)


def central_gradient(fun, x, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


# ---------------------------------------------------------------------------
# signomial documents used by the CLI tests


def _doc(n, terms, mode="exp"):
    return {"n": n, "mode": mode, "terms": [{"c": c, "e": [str(x) for x in e]} for c, e in terms]}


def example_docs() -> dict:
    ex33 = [(1, (4, 0)), (1, (0, 4)), (1, (0, 0))] + [(-1, (f"4/{k + 1}", f"4/{k + 1}")) for k in range(1, 5)]
    return {
        "m31": _doc(2, [(1, (4, 2)), (1, (2, 4)), (1, (0, 0)), (-3, (2, 2))], "poly"),
        "m327": _doc(2, [(1, (4, 2)), (1, (2, 4)), (27, (0, 0)), (-3, (2, 2))], "poly"),
        "ex33": _doc(2, ex33),
        "age": _doc(1, [(1, (0,)), (1, (1,)), (1, (3,)), (-3, (2,))]),
        "disjoint": _doc(2, [(2, (0, 0)), (1, (2, 0)), (1, (0, 2)), (-1, (1, 0)), (-1, (0, 1))]),
        "h": _doc(2, [(1, (2, 0)), (1, (0, 2)), (1, (-2, -2))]),
        "uni": _doc(1, [(1, (0,)), (-1, (2,)), (1, (4,))]),
        "p": _doc(1, [(5, (2,)), (5, (6,)), (-8, (4,))], "poly"),
    }


def diagonal_family(m: int) -> Signomial:
    """e^{4x} + e^{4y} + 1 - sum_{k=2}^{m+1} e^{(4/k)(x+y)}: dual-SONC coefficients, not DSONC."""
    terms = [(1, (4, 0)), (1, (0, 4)), (1, (0, 0))]
    terms += [(-1, (f"4/{k + 1}", f"4/{k + 1}")) for k in range(1, m + 1)]
    return Signomial.from_terms(terms, 2)
