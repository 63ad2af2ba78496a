"""Dense two-phase tableau simplex with Bland's rule.

The LPs that show up in circuit certification are tiny (a handful of
variables, one row per support point), so this is a plain dense kernel.
It runs either in double precision or, with ``exact=True``, over
:class:`fractions.Fraction` with all tolerances set to zero.

Two entry points:

* :func:`solve` takes a :class:`LinearProgram` in inequality form with
  free variables, ``maximize c.x  s.t.  A x <= b``.
* :func:`solve_standard` takes ``maximize c.x  s.t.  A x = b, x >= 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, Infeasible, NumericalBreakdown

__all__ = [
    "LinearProgram",
    "LpOutcome",
    "LpStatus",
    "StandardOutcome",
    "Tolerances",
    "feasible_point",
    "solve",
    "solve_standard",
]


@dataclass(frozen=True)
class Tolerances:
    feasibility: float = 1e-8
    pivot: float = 1e-12
    optimality: float = 1e-9


EXACT = Tolerances(0, 0, 0)


class LpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``maximize objective.x`` subject to ``rows[i].x <= rhs[i]``, x free."""

    objective: tuple
    rows: tuple
    rhs: tuple

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(self.objective))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        object.__setattr__(self, "rhs", tuple(self.rhs))
        n = len(self.objective)
        if len(self.rows) != len(self.rhs):
            raise DimensionMismatch("one right-hand side per constraint row required")
        for r in self.rows:
            if len(r) != n:
                raise DimensionMismatch(f"constraint row of length {len(r)}, expected {n}")
        for v in (*self.objective, *self.rhs, *(x for r in self.rows for x in r)):
            if isinstance(v, float) and not math.isfinite(v):
                raise ValueError("LP data must be finite")

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @classmethod
    def from_constraints(cls, objective, constraints):
        """Build from ``[(row, rhs), ...]`` pairs."""
        constraints = list(constraints)
        return cls(objective, [r for r, _ in constraints], [b for _, b in constraints])


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    solution: np.ndarray | None = None
    value: float | None = None
    # multipliers of the <= rows; y >= 0, A^T y = c, b.y = value at optimality
    duals: np.ndarray | None = None


@dataclass(frozen=True)
class StandardOutcome:
    status: LpStatus
    x: np.ndarray | None = None
    value: object = None
    basis: tuple = ()
    # multipliers of the equality rows (zero for rows found redundant)
    y: np.ndarray | None = None
    iterations: int = field(default=0, compare=False)


class _Tableau:
    """Rows hold B^-1 [A | b]; ``d`` holds reduced costs c_j - c_B B^-1 A_j
    with ``-c_B B^-1 b`` in its last slot."""

    def __init__(self, T, basis, tol: Tolerances, exact: bool):
        self.T = T
        self.basis = list(basis)
        self.tol = tol
        self.exact = exact
        self.d = None
        self.iterations = 0

    def set_objective(self, c):
        T = self.T
        d = np.zeros(T.shape[1], dtype=T.dtype)
        d[: len(c)] = c
        for i, j in enumerate(self.basis):
            cj = d[j]
            if cj != 0:
                d = d - cj * T[i]
        self.d = d

    def pivot(self, r, j):
        T = self.T
        T[r] = T[r] / T[r, j]
        for i in range(T.shape[0]):
            if i != r and T[i, j] != 0:
                T[i] = T[i] - T[i, j] * T[r]
        if self.d is not None and self.d[j] != 0:
            self.d = self.d - self.d[j] * T[r]
        self.basis[r] = j
        self.iterations += 1

    def run(self, n_cols, max_iter):
        """Bland's rule over the first ``n_cols`` columns. Returns True when
        optimal, False when unbounded."""
        T, tol = self.T, self.tol
        while True:
            if self.iterations > max_iter:
                raise NumericalBreakdown("simplex iteration limit reached")
            entering = None
            for j in range(n_cols):
                if self.d[j] > tol.optimality:
                    entering = j
                    break
            if entering is None:
                return True
            col = T[:, entering]
            rows = [i for i in range(T.shape[0]) if col[i] > tol.pivot]
            if not rows:
                return False
            ratios = {i: T[i, -1] / col[i] for i in rows}
            best = min(ratios.values())
            slack = 0 if self.exact else 1e-12 * (1 + abs(best))
            ties = [i for i in rows if ratios[i] <= best + slack]
            r = min(ties, key=lambda i: self.basis[i])
            self.pivot(r, entering)


def _as_array(data, exact):
    if not exact:
        return np.asarray(data, dtype=float)
    arr = np.array(data, dtype=object)
    if arr.size:
        arr = np.vectorize(Fraction, otypes=[object])(arr)
    return arr


def _solve_square(M, rhs, exact):
    if not exact:
        return np.linalg.solve(M.astype(float), rhs.astype(float))
    # Gauss-Jordan over the rationals
    n = M.shape[0]
    A = np.concatenate([M, rhs.reshape(-1, 1)], axis=1)
    for k in range(n):
        p = next(i for i in range(k, n) if A[i, k] != 0)
        if p != k:
            A[[k, p]] = A[[p, k]]
        A[k] = A[k] / A[k, k]
        for i in range(n):
            if i != k and A[i, k] != 0:
                A[i] = A[i] - A[i, k] * A[k]
    return A[:, -1]


def solve_standard(A, b, c, *, exact: bool = False, tol: Tolerances | None = None) -> StandardOutcome:
    """Maximize ``c.x`` subject to ``A x = b``, ``x >= 0``."""
    if tol is None:
        tol = EXACT if exact else Tolerances()
    b = _as_array(b, exact)
    c = _as_array(c, exact)
    A = _as_array(A, exact).reshape(len(b), len(c))
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise DimensionMismatch("inconsistent LP dimensions")
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0

    signs = np.where(np.array([v < 0 for v in b], dtype=bool), -1, 1)
    A_f = A * signs.reshape(-1, 1)
    b_f = b * signs
    if exact:
        A_f = A_f.astype(object)
        b_f = b_f.astype(object)

    T = np.empty((m, n + m + 1), dtype=object if exact else float)
    T[:, :n] = A_f
    T[:, n:n + m] = zero
    for i in range(m):
        T[i, n + i] = one
    T[:, -1] = b_f
    tab = _Tableau(T, range(n, n + m), tol, exact)
    max_iter = 50 * (m + n) + 1000

    # phase 1: maximize -(sum of artificials)
    c1 = np.array([zero] * n + [-one] * m, dtype=T.dtype)
    tab.set_objective(c1)
    tab.run(n + m, max_iter)
    # d[-1] is the remaining sum of artificials
    if tab.d[-1] > tol.feasibility * (1 + max((abs(v) for v in b_f), default=0)):
        return StandardOutcome(LpStatus.INFEASIBLE, iterations=tab.iterations)

    # drive artificials out of the basis; drop redundant rows
    keep = list(range(m))
    r = 0
    while r < len(tab.basis):
        if tab.basis[r] >= n:
            j = next((j for j in range(n) if abs(tab.T[r, j]) > tol.pivot), None)
            if j is None:
                tab.T = np.delete(tab.T, r, axis=0)
                del tab.basis[r]
                del keep[r]
                continue
            tab.pivot(r, j)
        r += 1

    tab.T = np.concatenate([tab.T[:, :n], tab.T[:, -1:]], axis=1)
    tab.set_objective(c)
    if not tab.run(n, max_iter):
        return StandardOutcome(LpStatus.UNBOUNDED, iterations=tab.iterations)

    x = np.array([zero] * n, dtype=T.dtype)
    for i, j in enumerate(tab.basis):
        x[j] = tab.T[i, -1]
    if not exact:
        x = np.where(np.abs(x) < tol.pivot, 0.0, x)
    value = sum((c[j] * x[j] for j in range(n)), zero)

    if not exact:
        resid = np.max(np.abs(A @ x - b), initial=0.0)
        if resid > tol.feasibility * (1 + np.max(np.abs(b), initial=0.0)) or np.min(x, initial=0.0) < -tol.feasibility:
            raise NumericalBreakdown(f"simplex solution violates constraints (residual {resid:.3e})")

    y = np.array([zero] * m, dtype=T.dtype)
    if tab.basis:
        B = A_f[np.ix_(keep, tab.basis)]
        yk = _solve_square(B.T, c[tab.basis], exact)
        for pos, i in enumerate(keep):
            y[i] = yk[pos] * int(signs[i])
    return StandardOutcome(LpStatus.OPTIMAL, x, value, tuple(tab.basis), y, tab.iterations)


def solve(lp: LinearProgram, *, exact: bool = False, tol: Tolerances | None = None) -> LpOutcome:
    """Solve ``maximize c.x  s.t.  A x <= b`` over free variables.

    Free variables are split as ``x = u - v`` with ``u, v >= 0`` and each row
    receives a slack.
    """
    n = lp.n_vars
    m = len(lp.rows)
    if exact:
        A = np.array([[Fraction(v) for v in r] for r in lp.rows], dtype=object).reshape(m, n)
        zero = Fraction(0)
    else:
        A = np.array(lp.rows, dtype=float).reshape(m, n)
        zero = 0.0
    eye = np.eye(m, dtype=float)
    if exact:
        eye = eye.astype(int).astype(object)
    A_std = np.concatenate([A, -A, eye], axis=1)
    c = list(lp.objective)
    c_std = c + [-v for v in c] + [zero] * m
    out = solve_standard(A_std, list(lp.rhs), c_std, exact=exact, tol=tol)
    if out.status is not LpStatus.OPTIMAL:
        return LpOutcome(out.status)
    x = out.x[:n] - out.x[n:2 * n]
    value = out.value if exact else float(out.value)
    return LpOutcome(LpStatus.OPTIMAL, x, value, out.y)


def feasible_point(polytope) -> tuple:
    """Return a vertex of ``{lam >= 0 : sum lam*alpha = beta, sum lam = 1}``.

    ``polytope`` is anything with an ``equality_system()`` method returning
    exact rational ``(rows, rhs)``; see :class:`dsonc.geometry.LambdaPolytope`.
    The result is exact.
    """
    rows, rhs = polytope.equality_system()
    n = len(rows[0]) if rows else 0
    out = solve_standard(rows, rhs, [0] * n, exact=True)
    if out.status is not LpStatus.OPTIMAL:
        raise Infeasible("inner point is not in the convex hull of the positive support")
    return tuple(out.x)
