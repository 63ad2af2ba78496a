"""Nonnegativity certificates for signomials built from circuit functions."""

from .cones import (
    BoundResult,
    CertificateReport,
    DsoncWitness,
    SplitPolicy,
    Verdict,
    check_dual_sonc_membership,
    circuit_number,
    dsonc_lower_bound,
    dual_circuit_number,
    is_dsonc_age,
    is_dsonc_circuit,
    is_dsonc_general,
    is_extreme_ray,
    is_sonc_age,
    is_sonc_circuit,
    primal_to_dual,
    sonc_bound_boost,
)
from .geometry import Circuit, SignedSupport, SupportSet, enumerate_minimal_circuits
from .signomial import AgeFunction, CircuitFunction, Signomial, evaluate
from .structure import equilibrium_point, generate_boundary_function, minimizer

__version__ = "0.1.0"

__all__ = [
    "AgeFunction",
    "BoundResult",
    "CertificateReport",
    "Circuit",
    "CircuitFunction",
    "DsoncWitness",
    "SignedSupport",
    "Signomial",
    "SplitPolicy",
    "SupportSet",
    "Verdict",
    "check_dual_sonc_membership",
    "circuit_number",
    "dsonc_lower_bound",
    "dual_circuit_number",
    "enumerate_minimal_circuits",
    "equilibrium_point",
    "evaluate",
    "generate_boundary_function",
    "is_dsonc_age",
    "is_dsonc_circuit",
    "is_dsonc_general",
    "is_extreme_ray",
    "is_sonc_age",
    "is_sonc_circuit",
    "minimizer",
    "primal_to_dual",
    "sonc_bound_boost",
]
