"""AMG with filtering for contact problems."""

from ._amgf import (
    AmgHierarchy,
    ConfigError,
    DomainError,
    Error,
    FilteredPreconditioner,
    LinearOperator,
    NotSpdError,
    ParseError,
    SetupError,
    SizeError,
    SparseMatrix,
    amg_setup,
    certify_amgf,
    pcg,
    run_experiment,
)


def from_scipy(a):
    """SparseMatrix from anything with a scipy-style tocsr()."""
    a = a.tocsr()
    a.sort_indices()
    return SparseMatrix(a.shape[0], a.shape[1], a.indptr.tolist(), a.indices.tolist(), a.data)


__all__ = [
    "AmgHierarchy", "ConfigError", "DomainError", "Error", "FilteredPreconditioner",
    "LinearOperator", "NotSpdError", "ParseError", "SetupError", "SizeError", "SparseMatrix",
    "amg_setup", "certify_amgf", "from_scipy", "pcg", "run_experiment",
]
