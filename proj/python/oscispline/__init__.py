"""Maximally oscillating perfect g-splines and weighted moduli of continuity."""

from ._oscispline import (
    Calculus,
    Oscillation,
    OscisplineError,
    Spline,
    Weight,
    brute_oscillation,
    check_assumptions,
    compute_C0,
    compute_Cn,
    fit_knots,
    least_deviating_primitive,
    omega,
    oscillate_halfline,
    oscillate_segment,
)

__all__ = [
    "Calculus",
    "Oscillation",
    "OscisplineError",
    "Spline",
    "Weight",
    "brute_oscillation",
    "check_assumptions",
    "compute_C0",
    "compute_Cn",
    "fit_knots",
    "least_deviating_primitive",
    "omega",
    "oscillate_halfline",
    "oscillate_segment",
]
