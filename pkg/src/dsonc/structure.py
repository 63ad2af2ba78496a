"""Equilibrium points, minimizers and the boundary generator for circuit functions.

Both the equilibrium and the minimizer are solutions of square linear systems
once logarithms are taken, so everything here is a single LU solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cones import Verdict, is_dsonc_circuit
from .errors import DegenerateCircuit, DimensionMismatch
from .geometry import Circuit
from .signomial import CircuitFunction, evaluate

BOUNDARY_RTOL = 1e-9
COINCIDENCE_TOL = 1e-8


@dataclass(frozen=True)
class EquilibriumResult:
    point: np.ndarray
    common_log_value: float  # s with c_a e^<q, a - beta> = e^s for every vertex


@dataclass(frozen=True)
class MinimizerResult:
    point: np.ndarray
    scale: float  # t with c_a e^<x*, a - beta> = t lam_a
    value: float  # f(x*)
    normalized_value: float  # e^-<x*, beta> f(x*) = t + c_beta


def _require_full_dimensional(circ: Circuit):
    if not circ.is_full_dimensional:
        raise DegenerateCircuit(
            f"circuit spans dimension {len(circ.vertices) - 1} in R^{circ.dim}; the log-linear system is underdetermined"
        )


def _log_system(circ: Circuit):
    """Rows [(a - beta)^T, -1] for every vertex a."""
    beta = np.array([float(x) for x in circ.inner])
    V = np.array([[float(x) for x in v] for v in circ.vertices])
    return np.hstack([V - beta, -np.ones((len(V), 1))])


def _solve(M, rhs):
    try:
        return np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - excluded by the full-dimension check
        raise DegenerateCircuit(str(exc)) from exc


def equilibrium_point(f: CircuitFunction) -> EquilibriumResult:
    """Solve ln c_a + <q, a - beta> = s for (q, s)."""
    _require_full_dimensional(f.circuit)
    sol = _solve(_log_system(f.circuit), -np.log(f.positive_coeffs))
    return EquilibriumResult(sol[:-1], float(sol[-1]))


def minimizer(f: CircuitFunction) -> MinimizerResult:
    """Stationary point of e^-<x, beta> f(x): solve ln c_a + <x, a - beta> = ln t + ln lam_a.

    The location depends only on the vertex coefficients.
    """
    _require_full_dimensional(f.circuit)
    lam = np.array([float(l) for l in f.lam])
    sol = _solve(_log_system(f.circuit), np.log(lam) - np.log(f.positive_coeffs))
    x = sol[:-1]
    t = math.exp(sol[-1])
    return MinimizerResult(x, t, evaluate(f.to_signomial(), x), t + f.inner_coeff)


def is_dsonc_boundary_via_equilibrium(f: CircuitFunction) -> bool:
    """|c_beta| equals the common equilibrium value e^s."""
    eq = equilibrium_point(f)
    es = math.exp(eq.common_log_value)
    return f.inner_coeff < 0 and abs(-f.inner_coeff - es) <= BOUNDARY_RTOL * max(1.0, es)


def tropical_genus_zero(f: CircuitFunction) -> bool:
    """The inner term does not dominate at the equilibrium: ln|c_beta| <= s."""
    eq = equilibrium_point(f)
    if f.inner_coeff >= 0:
        return True
    s = eq.common_log_value
    return math.log(-f.inner_coeff) <= s + BOUNDARY_RTOL * max(1.0, abs(s))


def generate_boundary_function(circuit: Circuit, w, t: float) -> CircuitFunction:
    """The DSONC boundary function with equilibrium w and inner coefficient -t.

    Vertex coefficients are t e^-<w, a - beta>.
    """
    _require_full_dimensional(circuit)
    w = np.asarray(w, dtype=float)
    if w.shape != (circuit.dim,):
        raise DimensionMismatch(f"w must have {circuit.dim} entries")
    if not t > 0:
        raise ValueError("t must be positive")
    beta = np.array([float(x) for x in circuit.inner])
    coeffs = tuple(
        t * math.exp(-float(w @ (np.array([float(x) for x in v]) - beta))) for v in circuit.vertices
    )
    return CircuitFunction(circuit, coeffs, -t)


@dataclass(frozen=True)
class CoincidenceResult:
    coincide: bool
    distance: float
    barycentric: bool  # all lam_a equal
    inner_is_reciprocal: bool  # |c_beta| = 1/(n+1)


def minimizer_equals_equilibrium(f: CircuitFunction) -> CoincidenceResult:
    x = minimizer(f).point
    q = equilibrium_point(f).point
    dist = float(np.max(np.abs(x - q), initial=0.0))
    lam = f.lam
    n = f.dim
    return CoincidenceResult(
        dist <= COINCIDENCE_TOL,
        dist,
        all(l == lam[0] for l in lam),
        abs(abs(f.inner_coeff) - 1.0 / (n + 1)) <= BOUNDARY_RTOL,
    )


def boundary_verdicts_agree(f: CircuitFunction) -> bool:
    """Consistency of the equilibrium route with the closed-form dual circuit number."""
    return is_dsonc_boundary_via_equilibrium(f) == (is_dsonc_circuit(f) is Verdict.BOUNDARY)
