#pragma once

// Shared fixtures for the unit tests. The oracles here deliberately use
// different dense algorithms (LU, Jacobi SVD, self-adjoint eigensolver) from
// the ones inside the library.

#include <Eigen/Dense>
#include <random>

#include "hsolve/kernels.hpp"
#include "hsolve/sparse.hpp"

namespace testutil {

using hsolve::DenseMatrix;
using hsolve::Index;
using hsolve::Vector;

inline DenseMatrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  DenseMatrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = nd(rng);
  return M;
}

inline Vector random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

inline DenseMatrix random_spd(std::mt19937_64& rng, Index n, double shift = 1.0) {
  const DenseMatrix B = random_matrix(rng, n, n);
  DenseMatrix M = B * B.transpose() / static_cast<double>(n);
  M.diagonal().array() += shift;
  return (0.5 * (M + M.transpose())).eval();
}

// Orthonormal columns from a QR of a Gaussian matrix.
inline DenseMatrix random_orthonormal(std::mt19937_64& rng, Index rows, Index cols) {
  const Eigen::MatrixXd g = random_matrix(rng, rows, cols);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols));
}

inline Vector jacobi_singular_values(const DenseMatrix& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(M)};
  return svd.singularValues();
}

inline double spectral_norm(const DenseMatrix& M) {
  if (M.size() == 0) return 0.0;
  return jacobi_singular_values(M)(0);
}

// Schur complement of A onto `keep` after eliminating `drop`, via LU.
inline DenseMatrix schur_lu(const DenseMatrix& A, const std::vector<Index>& drop,
                            const std::vector<Index>& keep) {
  Eigen::MatrixXd Add(drop.size(), drop.size()), Adk(drop.size(), keep.size()),
      Akk(keep.size(), keep.size());
  for (std::size_t i = 0; i < drop.size(); ++i) {
    for (std::size_t j = 0; j < drop.size(); ++j) Add(i, j) = A(drop[i], drop[j]);
    for (std::size_t j = 0; j < keep.size(); ++j) Adk(i, j) = A(drop[i], keep[j]);
  }
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) Akk(i, j) = A(keep[i], keep[j]);
  if (drop.empty()) return Akk;
  return Akk - Adk.transpose() * Add.partialPivLu().solve(Adk);
}

inline hsolve::SparseSpdMatrix sparse_from_dense(const DenseMatrix& D) {
  std::vector<hsolve::Triplet> t;
  for (Index i = 0; i < D.rows(); ++i)
    for (Index j = 0; j < D.cols(); ++j)
      if (D(i, j) != 0.0) t.push_back({i, j, D(i, j)});
  return hsolve::SparseSpdMatrix::from_triplets(D.rows(), std::move(t));
}

inline Vector lu_solve(const DenseMatrix& A, const Vector& b) {
  return Eigen::MatrixXd(A).partialPivLu().solve(b);
}

}  // namespace testutil
