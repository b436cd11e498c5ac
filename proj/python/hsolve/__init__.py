"""Hierarchical SPD solver with deferred compression."""

from ._core import (
    BreakdownNonpositivePivot,
    ColumnMap,
    ColumnSplitRequired,
    DiagonalNotSPD,
    DimensionError,
    Factorization,
    HsolveError,
    InvalidArgument,
    IoError,
    NonPositiveDiagonal,
    NotPositiveDefinite,
    NotSymmetric,
    ParseError,
    PartitionMismatch,
    PreconditionerNotPositive,
    SolverConfig,
    SparseSpdMatrix,
    aniso_eigenvalue,
    corollary_suite,
    exactness_suite,
    factor,
    from_csr,
    gen_aniso2d,
    gen_extruded3d,
    gmres,
    identity,
    load_column_map,
    load_matrix_market,
    pcg,
    props_suite,
    save_matrix_market,
    spd_operator_check,
)


def from_scipy(matrix, coords=None):
    """Convert a symmetric scipy.sparse matrix (both triangles stored)."""
    csr = matrix.tocsr()
    csr.sort_indices()
    return from_csr(csr.shape[0], csr.indptr, csr.indices, csr.data, coords)


def to_scipy(matrix):
    """Return the matrix as a scipy.sparse.csr_matrix."""
    import scipy.sparse

    indptr, indices, data = matrix.csr()
    return scipy.sparse.csr_matrix((data, indices, indptr), shape=(matrix.n, matrix.n))
