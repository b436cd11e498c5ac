#include "hsolve/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hsolve {

namespace {

void require_square(const DenseMatrix& M, const char* who) {
  if (M.rows() != M.cols()) {
    throw DimensionError(std::string(who) + ": matrix is " + std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()) + ", expected square");
  }
}

// Unblocked scan used only to report where a failed factorization broke down.
std::pair<Index, double> locate_bad_pivot(const DenseMatrix& M) {
  const Index n = M.rows();
  DenseMatrix L = DenseMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = M(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) return {j, d};
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      L(i, j) = (M(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / ljj;
    }
  }
  return {n - 1, M(n - 1, n - 1)};
}

}  // namespace

DenseMatrix cholesky_unchecked(const DenseMatrix& M) {
  require_square(M, "cholesky");
  if (M.rows() == 0) return DenseMatrix(0, 0);
  Eigen::LLT<DenseMatrix, Eigen::Lower> llt(M);
  if (llt.info() != Eigen::Success) {
    auto [pivot, value] = locate_bad_pivot(M);
    throw NotPositiveDefinite(pivot, value);
  }
  DenseMatrix G = llt.matrixL();
  for (Index j = 0; j < G.rows(); ++j) {
    if (!(G(j, j) > 0.0) || !std::isfinite(G(j, j))) throw NotPositiveDefinite(j, G(j, j));
  }
  return G;
}

DenseMatrix dense_cholesky(const DenseMatrix& M) {
  require_square(M, "dense_cholesky");
  const double scale = M.cwiseAbs().maxCoeff();
  if (M.size() > 0 && (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NotSymmetric("dense_cholesky: input is not symmetric");
  }
  return cholesky_unchecked(M);
}

DenseMatrix tri_solve(const DenseMatrix& G, const DenseMatrix& B, TriSolveMode mode) {
  require_square(G, "tri_solve");
  const bool left = mode == TriSolveMode::left_forward || mode == TriSolveMode::left_backward;
  const Index needed = left ? B.rows() : B.cols();
  if (needed != G.rows()) {
    throw DimensionError("tri_solve: factor is " + std::to_string(G.rows()) +
                         " but right-hand side has " + std::to_string(needed));
  }
  for (Index i = 0; i < G.rows(); ++i) {
    if (G(i, i) == 0.0) throw SingularTriangular(i);
  }
  const auto L = G.triangularView<Eigen::Lower>();
  switch (mode) {
    case TriSolveMode::left_forward:
      return L.solve(B);
    case TriSolveMode::left_backward:
      return L.transpose().solve(B);
    case TriSolveMode::right_forward:
      // X G^T = B
      return L.transpose().solve<Eigen::OnTheRight>(B);
    case TriSolveMode::right_backward:
      // X G = B
      return L.solve<Eigen::OnTheRight>(B);
  }
  return {};
}

TruncatedFactor truncated_lowrank(const DenseMatrix& M, double eps, TruncationMode mode) {
  if (!(eps >= 0.0)) throw InvalidArgument("truncated_lowrank: eps must be nonnegative");
  const Index m = M.rows();
  const Index n = M.cols();
  TruncatedFactor out;
  out.basis = DenseMatrix::Identity(m, m);
  if (m == 0 || n == 0) {
    out.U1 = DenseMatrix(m, 0);
    out.V1 = DenseMatrix(n, 0);
    out.singular_values = Vector(0);
    return out;
  }

  // For wide blocks, reduce to an m x m triangle first: M^T = Q R, M = R^T Q^T,
  // so M and R^T share left singular vectors and singular values.
  Eigen::MatrixXd core;
  if (n > m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M.transpose());
    core = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>().transpose();
  } else {
    core = M;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(core, Eigen::ComputeFullU);
  out.singular_values = svd.singularValues();
  out.basis = svd.matrixU();

  const double smax = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  out.threshold = mode == TruncationMode::absolute ? eps : eps * smax;
  Index k = 0;
  // Ties at the threshold are kept; exact zeros never are.
  while (k < out.singular_values.size() && out.singular_values(k) > 0.0 &&
         out.singular_values(k) >= out.threshold) {
    ++k;
  }
  out.rank = k;
  out.tail_norm = k < out.singular_values.size() ? out.singular_values(k) : 0.0;
  out.U1 = out.basis.leftCols(k);
  out.V1 = M.transpose() * out.U1;
  return out;
}

std::pair<double, double> extreme_singular_values(const DenseMatrix& M) {
  if (M.size() == 0) throw DimensionError("extreme_singular_values: empty matrix");
  const Eigen::MatrixXd dense = M;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
  const auto& s = svd.singularValues();
  return {s(0), s(s.size() - 1)};
}

double norm2(const DenseMatrix& M) {
  if (M.size() == 0) return 0.0;
  return extreme_singular_values(M).first;
}

}  // namespace hsolve
