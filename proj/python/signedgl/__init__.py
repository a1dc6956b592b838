"""Ginzburg-Landau node classification on signed graphs."""

from ._core import (
    ConvergenceError,
    DivergenceError,
    Error,
    InvalidInput,
    NotPsdError,
    SignedGraph,
    UnsupportedOperation,
    classify_binary,
    classify_multiclass,
    harmonic_functions,
    largest_component,
    load_edge_list,
    local_global,
    operator_matrix,
    run_experiment,
    simplex_project,
    smallest_eigs,
    ssbm,
)

__all__ = [
    "ConvergenceError",
    "DivergenceError",
    "Error",
    "InvalidInput",
    "NotPsdError",
    "SignedGraph",
    "UnsupportedOperation",
    "classify_binary",
    "classify_multiclass",
    "harmonic_functions",
    "largest_component",
    "load_edge_list",
    "local_global",
    "operator_matrix",
    "run_experiment",
    "simplex_project",
    "smallest_eigs",
    "ssbm",
]
