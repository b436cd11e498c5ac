#include "hsolve/krylov.hpp"

#include <chrono>
#include <cmath>

namespace hsolve {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double true_relres(const SparseSpdMatrix& A, const Vector& b, const Vector& x, double bnorm,
                   Vector& scratch) {
  A.multiply(x, scratch);
  return (b - scratch).norm() / bnorm;
}

}  // namespace

Preconditioner identity_preconditioner() {
  return [](const Vector& r) { return r; };
}

Preconditioner make_preconditioner(const HierFactorization& fac) {
  return [&fac](const Vector& r) { return preconditioner_apply(fac, r); };
}

KrylovResult pcg(const SparseSpdMatrix& A, const Vector& b, const Preconditioner& precond,
                 double tol, Index maxit) {
  if (b.size() != A.n()) throw DimensionError("pcg: right-hand side size mismatch");
  if (!(tol > 0.0)) throw InvalidArgument("pcg: tol must be positive");
  const auto t0 = Clock::now();
  KrylovResult out;
  auto& rep = out.report;
  out.x = Vector::Zero(A.n());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.residual_history = {0.0};
    rep.final_relres = 0.0;
    rep.solve_seconds = seconds_since(t0);
    return out;
  }
  rep.residual_history.push_back(1.0);

  Vector r = b;
  Vector z = precond(r);
  double rz = r.dot(z);
  if (!(rz > 0.0)) throw PreconditionerNotPositive(0, rz);
  Vector p = z;
  Vector Ap(A.n());
  Vector scratch(A.n());
  for (Index it = 1; it <= maxit; ++it) {
    A.multiply(p, Ap);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) throw Error("pcg: matrix is not positive definite (p'Ap <= 0)");
    const double alpha = rz / pAp;
    out.x.noalias() += alpha * p;
    r.noalias() -= alpha * Ap;
    const double rel = true_relres(A, b, out.x, bnorm, scratch);
    rep.residual_history.push_back(rel);
    rep.iterations = it;
    if (rel <= tol) {
      rep.converged = true;
      break;
    }
    z = precond(r);
    const double rz_new = r.dot(z);
    if (!(rz_new > 0.0)) throw PreconditionerNotPositive(it, rz_new);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  rep.final_relres = rep.residual_history.back();
  rep.solve_seconds = seconds_since(t0);
  return out;
}

KrylovResult gmres(const SparseSpdMatrix& A, const Vector& b, const Preconditioner& precond,
                   Index restart, double tol, Index maxit) {
  if (b.size() != A.n()) throw DimensionError("gmres: right-hand side size mismatch");
  if (restart < 1) throw InvalidArgument("gmres: restart must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("gmres: tol must be positive");
  const auto t0 = Clock::now();
  const Index n = A.n();
  KrylovResult out;
  auto& rep = out.report;
  out.x = Vector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.residual_history = {0.0};
    rep.solve_seconds = seconds_since(t0);
    return out;
  }
  rep.residual_history.push_back(1.0);

  Eigen::MatrixXd V(n, restart + 1);
  Eigen::MatrixXd Z(n, restart);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(restart + 1, restart);
  Vector cs(restart), sn(restart), g(restart + 1);
  Vector scratch(n), w(n);

  Index total = 0;
  while (total < maxit && !rep.converged) {
    A.multiply(out.x, scratch);
    Vector r = b - scratch;
    const double beta = r.norm();
    if (beta / bnorm <= tol) {
      rep.converged = true;
      break;
    }
    V.col(0) = r / beta;
    g.setZero();
    g(0) = beta;
    H.setZero();
    Vector x_trial = out.x;
    for (Index j = 0; j < restart && total < maxit; ++j) {
      Z.col(j) = precond(V.col(j));
      A.multiply(Z.col(j), w);
      for (Index i = 0; i <= j; ++i) {
        H(i, j) = V.col(i).dot(w);
        w.noalias() -= H(i, j) * V.col(i);
      }
      const double h_next = w.norm();
      H(j + 1, j) = h_next;
      for (Index i = 0; i < j; ++i) {
        const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
        H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs(j) = denom == 0.0 ? 1.0 : H(j, j) / denom;
      sn(j) = denom == 0.0 ? 0.0 : H(j + 1, j) / denom;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);
      ++total;

      const Vector y = H.topLeftCorner(j + 1, j + 1).triangularView<Eigen::Upper>().solve(g.head(j + 1));
      x_trial = out.x + Z.leftCols(j + 1) * y;
      const double rel = true_relres(A, b, x_trial, bnorm, scratch);
      rep.residual_history.push_back(rel);
      rep.iterations = total;
      if (rel <= tol) {
        rep.converged = true;
        break;
      }
      if (h_next == 0.0) break;
      V.col(j + 1) = w / h_next;
    }
    out.x = x_trial;
  }
  rep.final_relres = rep.residual_history.back();
  rep.solve_seconds = seconds_since(t0);
  return out;
}

IncompleteCholesky IncompleteCholesky::factor(const SparseSpdMatrix& A, double retry_shift) {
  double shift = 0.0;
  for (int attempt = 0;; ++attempt) {
    IncompleteCholesky ic;
    ic.n_ = A.n();
    ic.shift_ = shift;
    ic.row_offsets_.assign(static_cast<std::size_t>(A.n()) + 1, 0);
    for (Index i = 0; i < A.n(); ++i) {
      for (Index j : A.row_cols(i)) {
        if (j <= i) {
          ic.cols_.push_back(j);
          ++ic.row_offsets_[i + 1];
        }
      }
      ic.row_offsets_[i + 1] += ic.row_offsets_[i];
    }
    ic.vals_.assign(ic.cols_.size(), 0.0);

    std::vector<Index> pos(static_cast<std::size_t>(A.n()), -1);
    try {
      for (Index i = 0; i < A.n(); ++i) {
        const Index begin = ic.row_offsets_[i], end = ic.row_offsets_[i + 1];
        {
          auto cols = A.row_cols(i);
          auto vals = A.row_values(i);
          Index k = begin;
          for (std::size_t t = 0; t < cols.size() && cols[t] <= i; ++t, ++k) {
            ic.vals_[k] = vals[t];
            if (cols[t] == i) ic.vals_[k] *= 1.0 + shift;
          }
        }
        for (Index k = begin; k < end; ++k) pos[ic.cols_[k]] = k;
        for (Index k = begin; k < end; ++k) {
          const Index c = ic.cols_[k];
          const Index cb = ic.row_offsets_[c], ce = ic.row_offsets_[c + 1];
          double s = ic.vals_[k];
          for (Index t = cb; t < ce - 1; ++t) {
            const Index p = pos[ic.cols_[t]];
            if (p >= 0 && p < k) s -= ic.vals_[p] * ic.vals_[t];
          }
          if (c == i) {
            if (!(s > 0.0)) throw BreakdownNonpositivePivot(i, s);
            ic.vals_[k] = std::sqrt(s);
          } else {
            ic.vals_[k] = s / ic.vals_[ce - 1];
          }
        }
        for (Index k = begin; k < end; ++k) pos[ic.cols_[k]] = -1;
      }
      return ic;
    } catch (const BreakdownNonpositivePivot&) {
      if (retry_shift <= 0.0 || attempt >= 10) throw;
      shift = shift == 0.0 ? retry_shift : 2.0 * shift;
    }
  }
}

Vector IncompleteCholesky::apply(const Vector& r) const {
  if (r.size() != n_) throw DimensionError("IC(0) apply: size mismatch");
  Vector y = r;
  for (Index i = 0; i < n_; ++i) {
    const Index end = row_offsets_[i + 1];
    double s = y[i];
    for (Index k = row_offsets_[i]; k < end - 1; ++k) s -= vals_[k] * y[cols_[k]];
    y[i] = s / vals_[end - 1];
  }
  for (Index i = n_; i-- > 0;) {
    const Index end = row_offsets_[i + 1];
    y[i] /= vals_[end - 1];
    for (Index k = row_offsets_[i]; k < end - 1; ++k) y[cols_[k]] -= vals_[k] * y[i];
  }
  return y;
}

Preconditioner IncompleteCholesky::as_preconditioner() const {
  return [this](const Vector& r) { return apply(r); };
}

}  // namespace hsolve
