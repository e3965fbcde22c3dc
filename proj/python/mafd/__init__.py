"""Wide-stencil finite-difference solver for the Dirichlet Monge-Ampere equation."""

from mafd._core import (
    Grid,
    SolveResult,
    build_grid,
    build_rhs,
    c0_bound,
    contraction_ratio,
    discrete_ma_measure,
    exact_solution,
    inv_norm_estimate,
    is_discrete_convex,
    lipschitz_estimate,
    ma_apply,
    max_error_vs_exact,
    poisson_solve,
    problem_names,
    reference_measure,
    restrict,
    solve,
    stencil_bases,
    unit_square_grid,
)

__all__ = [
    "Grid",
    "SolveResult",
    "build_grid",
    "build_rhs",
    "c0_bound",
    "contraction_ratio",
    "discrete_ma_measure",
    "exact_solution",
    "inv_norm_estimate",
    "is_discrete_convex",
    "lipschitz_estimate",
    "ma_apply",
    "max_error_vs_exact",
    "poisson_solve",
    "problem_names",
    "reference_measure",
    "restrict",
    "solve",
    "stencil_bases",
    "unit_square_grid",
]

__version__ = "0.1.0"
