"""Exact periodic data, separation decisions and skew-product diagnostics
for hyperbolic toral automorphisms.

Everything lives in the compiled extension; this package only re-exports it.
Exact values (orbit coordinates, certificate functionals) cross the boundary
as strings of rationals so nothing is rounded on the way out.
"""

from ._core import (
    ClosedOrbit,
    Cocycle,
    DomainError,
    GridSpec,
    Map,
    UsageError,
    birkhoff_sum,
    close_orbit,
    constant_cocycle,
    construct_inseparable,
    coverage,
    decide_weights,
    find_near_returns,
    holder_distance,
    periodic_weights,
    sup_distance,
    theoretical_contraction,
    transitive_point_search,
    truncate_cocycle,
    validate_map,
    verify_shadowing,
    weak_mixing_diagnostic,
    weight_closeness,
)

__version__ = "0.1.0"

__all__ = [
    "ClosedOrbit",
    "Cocycle",
    "DomainError",
    "GridSpec",
    "Map",
    "UsageError",
    "birkhoff_sum",
    "close_orbit",
    "constant_cocycle",
    "construct_inseparable",
    "coverage",
    "decide_weights",
    "find_near_returns",
    "holder_distance",
    "periodic_weights",
    "sup_distance",
    "theoretical_contraction",
    "transitive_point_search",
    "truncate_cocycle",
    "validate_map",
    "verify_shadowing",
    "weak_mixing_diagnostic",
    "weight_closeness",
]
