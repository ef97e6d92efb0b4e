"""Weighted pseudospectra of matrix polynomials."""

from ._core import (
    Error,
    MatrixPolynomial,
    WeightPolynomial,
    build_qhat,
    build_qtilde,
    certify_multiple,
    component_count,
    compute_field,
    distance_to_eigenvalue,
    distance_to_multiple,
    eigenvalues,
    f_eps,
    fault_points,
    find_saddle,
    grad_s_min,
    load_problem,
    run_cli,
    s_min,
    singular_values,
)

__version__ = "0.1.0"
