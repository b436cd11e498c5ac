#pragma once

// Preconditioned conjugate gradients, restarted GMRES and a zero-fill
// incomplete Cholesky preconditioner.

#include <functional>
#include <vector>

#include "hsolve/hfact.hpp"
#include "hsolve/sparse.hpp"

namespace hsolve {

/// z = M^{-1} r
using Preconditioner = std::function<Vector(const Vector&)>;

Preconditioner identity_preconditioner();
Preconditioner make_preconditioner(const HierFactorization& fac);

struct SolveReport {
  bool converged = false;
  Index iterations = 0;
  std::vector<double> residual_history;  // true relative residuals, entry 0 is the initial one
  double final_relres = 0.0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  std::vector<LevelStats> level_stats;
  std::size_t memory_estimate_bytes = 0;
};

struct KrylovResult {
  Vector x;
  SolveReport report;
};

/// Throws PreconditionerNotPositive when <z, r> <= 0.
KrylovResult pcg(const SparseSpdMatrix& A, const Vector& b, const Preconditioner& precond,
                 double tol = 1e-12, Index maxit = 1000);

/// Right-preconditioned GMRES(restart).
KrylovResult gmres(const SparseSpdMatrix& A, const Vector& b, const Preconditioner& precond,
                   Index restart = 200, double tol = 1e-12, Index maxit = 1000);

/// IC(0): Cholesky restricted to the lower-triangular pattern of A.
class IncompleteCholesky {
 public:
  /// Throws BreakdownNonpositivePivot. With `retry_shift` > 0 a breakdown
  /// is retried on A + shift * diag(A), doubling the shift up to 10 times.
  static IncompleteCholesky factor(const SparseSpdMatrix& A, double retry_shift = 0.0);

  Vector apply(const Vector& r) const;
  double shift_used() const { return shift_; }
  Preconditioner as_preconditioner() const;

 private:
  Index n_ = 0;
  // Lower factor in CSR, diagonal last in each row.
  std::vector<Index> row_offsets_;
  std::vector<Index> cols_;
  std::vector<double> vals_;
  double shift_ = 0.0;
};

}  // namespace hsolve
