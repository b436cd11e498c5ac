#pragma once

// Dense linear-algebra primitives: Cholesky, triangular solves, truncated
// low-rank factorization and extreme singular values.

#include <Eigen/Dense>
#include <utility>

#include "hsolve/errors.hpp"

namespace hsolve {

using Index = Eigen::Index;
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class TruncationMode { absolute, relative };

/// Low-rank split M = U1 * V1^T + R with ||R||_2 = tail_norm.
///
/// `basis` is the full square orthogonal matrix whose leading `rank` columns
/// are U1; the trailing columns span the discarded directions.
struct TruncatedFactor {
  DenseMatrix U1;
  DenseMatrix V1;
  Index rank = 0;
  double tail_norm = 0.0;
  DenseMatrix basis;
  Vector singular_values;  // descending, min(rows, cols) entries
  double threshold = 0.0;  // nonzero singular values >= this are kept
};

/// Lower-triangular G with G * G^T = M. Throws NotPositiveDefinite on the
/// first nonpositive pivot.
DenseMatrix dense_cholesky(const DenseMatrix& M);

/// Same as dense_cholesky but without the symmetry precondition check.
DenseMatrix cholesky_unchecked(const DenseMatrix& M);

/// left_forward:   X = G^{-1} B
/// left_backward:  X = G^{-T} B
/// right_forward:  X = B G^{-T}
/// right_backward: X = B G^{-1}
enum class TriSolveMode { left_forward, left_backward, right_forward, right_backward };

DenseMatrix tri_solve(const DenseMatrix& G, const DenseMatrix& B, TriSolveMode mode);

TruncatedFactor truncated_lowrank(const DenseMatrix& M, double eps,
                                  TruncationMode mode = TruncationMode::absolute);

/// (sigma_max, sigma_min) of a nonempty matrix.
std::pair<double, double> extreme_singular_values(const DenseMatrix& M);

/// Spectral norm; zero for empty matrices.
double norm2(const DenseMatrix& M);

}  // namespace hsolve
