#include "hsolve/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "hsolve/problems.hpp"

namespace hsolve {

namespace {

constexpr double kMachEps = std::numeric_limits<double>::epsilon();

DenseMatrix gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  DenseMatrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = nd(rng);
  }
  return M;
}

// rows x cols with orthonormal columns (cols <= rows).
DenseMatrix random_orthonormal(std::mt19937_64& rng, Index rows, Index cols) {
  const Eigen::MatrixXd g = gaussian(rng, rows, cols);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  return q;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Index uniform_index(std::mt19937_64& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

double min_symmetric_eigenvalue(const DenseMatrix& M) {
  if (M.rows() == 0) return 0.0;
  const Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_blocks(const BlockSystem& s) {
  const Index ns = s.Ass.rows(), nn = s.Ann.rows(), nw = s.Aww.rows();
  if (s.Ass.cols() != ns || s.Ann.cols() != nn || s.Aww.cols() != nw || s.Asn.rows() != ns ||
      s.Asn.cols() != nn || s.Asw.rows() != ns || s.Asw.cols() != nw || s.Anw.rows() != nn ||
      s.Anw.cols() != nw) {
    throw DimensionError("block system: inconsistent block shapes");
  }
}

}  // namespace

DenseMatrix BlockSystem::assemble() const {
  check_blocks(*this);
  const Index s = ns(), n = nn(), w = nw();
  DenseMatrix A(s + n + w, s + n + w);
  A.block(0, 0, s, s) = Ass;
  A.block(0, s, s, n) = Asn;
  A.block(0, s + n, s, w) = Asw;
  A.block(s, 0, n, s) = Asn.transpose();
  A.block(s, s, n, n) = Ann;
  A.block(s, s + n, n, w) = Anw;
  A.block(s + n, 0, w, s) = Asw.transpose();
  A.block(s + n, s, w, n) = Anw.transpose();
  A.block(s + n, s + n, w, w) = Aww;
  return A;
}

DenseMatrix exact_schur(const DenseMatrix& Ass, const DenseMatrix& Asn, const DenseMatrix& Asw,
                        const DenseMatrix& Ann, const DenseMatrix& Anw, const DenseMatrix& Aww) {
  BlockSystem sys{Ass, Asn, Asw, Ann, Anw, Aww};
  return exact_schur(sys);
}

DenseMatrix exact_schur(const BlockSystem& sys) {
  check_blocks(sys);
  const Index n = sys.nn(), w = sys.nw();
  DenseMatrix rhs(sys.ns(), n + w);
  rhs.leftCols(n) = sys.Asn;
  rhs.rightCols(w) = sys.Asw;
  DenseMatrix S(n + w, n + w);
  S.topLeftCorner(n, n) = sys.Ann;
  S.topRightCorner(n, w) = sys.Anw;
  S.bottomLeftCorner(w, n) = sys.Anw.transpose();
  S.bottomRightCorner(w, w) = sys.Aww;
  if (sys.ns() == 0) return S;
  const DenseMatrix G = dense_cholesky(sys.Ass);
  const DenseMatrix Y = tri_solve(G, rhs, TriSolveMode::left_forward);
  S.noalias() -= Y.transpose() * Y;
  return S;
}

BlockSystem random_block_system(std::mt19937_64& rng, double eps, const BlockSystemSpec& spec) {
  if (spec.min_block < 1 || spec.max_block < spec.min_block) {
    throw InvalidArgument("random_block_system: invalid block size range");
  }
  if (!(spec.min_sigma > 0.0 && spec.max_sigma >= spec.min_sigma)) {
    throw InvalidArgument("random_block_system: invalid sigma range");
  }
  if (!(eps > 0.0)) throw InvalidArgument("random_block_system: eps must be positive");
  const Index ns = uniform_index(rng, spec.min_block, spec.max_block);
  const Index nn = uniform_index(rng, spec.min_block, spec.max_block);
  const Index nw = uniform_index(rng, spec.min_block, spec.max_block);

  const double smin = std::exp(uniform(rng, std::log(spec.min_sigma), std::log(spec.max_sigma)));
  Vector spectrum(ns);
  for (Index i = 0; i < ns; ++i) {
    const double t = ns == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(ns - 1);
    spectrum[i] = std::exp(std::log(spec.max_sigma) + t * (std::log(smin) - std::log(spec.max_sigma)));
  }
  const DenseMatrix Q = random_orthonormal(rng, ns, ns);
  DenseMatrix Ass = Q * spectrum.asDiagonal() * Q.transpose();
  Ass = (0.5 * (Ass + Ass.transpose())).eval();
  const DenseMatrix G = dense_cholesky(Ass);

  // M: geometric singular-value decay straddling eps.
  const Index r = std::min(ns, nw);
  const double s0 = eps * std::exp2(uniform(rng, 0.5, 4.0));
  double rate = uniform(rng, 0.3, 0.8);
  // Make sure some singular values fall below eps so truncation happens.
  if (r > 1 && s0 * std::pow(rate, static_cast<double>(r - 1)) > 0.5 * eps) {
    rate = std::pow(0.5 * eps / s0, 1.0 / static_cast<double>(r - 1));
  }
  Vector sv(r);
  for (Index j = 0; j < r; ++j) sv[j] = s0 * std::pow(rate, static_cast<double>(j));
  const DenseMatrix P = random_orthonormal(rng, ns, r);
  const DenseMatrix R = random_orthonormal(rng, nw, r);
  const DenseMatrix M = P * sv.asDiagonal() * R.transpose();
  const DenseMatrix N = gaussian(rng, ns, nn) / std::sqrt(static_cast<double>(ns));

  DenseMatrix K(ns, nn + nw);
  K.leftCols(nn) = N;
  K.rightCols(nw) = M;
  const DenseMatrix B = gaussian(rng, nn + nw, nn + nw);
  DenseMatrix C = B * B.transpose() / static_cast<double>(nn + nw);
  C.diagonal().array() += 0.1;
  DenseMatrix lower = K.transpose() * K + C;
  lower = (0.5 * (lower + lower.transpose())).eval();

  BlockSystem sys;
  sys.Ass = std::move(Ass);
  sys.Asn = G * N;
  sys.Asw = G * M;
  sys.Ann = lower.topLeftCorner(nn, nn);
  sys.Anw = lower.topRightCorner(nn, nw);
  sys.Aww = lower.bottomRightCorner(nw, nw);
  return sys;
}

ErrorReport schur_error_experiment(const BlockSystem& sys, double eps, bool deferred_compression) {
  check_blocks(sys);
  if (!(eps >= 0.0)) throw InvalidArgument("schur_error_experiment: eps must be nonnegative");
  if (sys.ns() == 0) throw InvalidArgument("schur_error_experiment: empty s block");
  ErrorReport rep;
  rep.deferred_compression = deferred_compression;
  rep.eps = eps;
  const DenseMatrix G = dense_cholesky(sys.Ass);
  std::tie(rep.sigma_max, rep.sigma_min) = extreme_singular_values(sys.Ass);
  rep.asw_norm = norm2(sys.Asw);
  rep.asn_norm = norm2(sys.Asn);
  rep.ans_norm = norm2(DenseMatrix(sys.Asn.transpose()));

  // Update terms Y^T Y with Y = G^{-1} [Asn Asw]; the A_nn/A_nw/A_ww parts
  // cancel in S_approx - S_exact.
  const DenseMatrix Yn = tri_solve(G, sys.Asn, TriSolveMode::left_forward);
  const DenseMatrix Yw = tri_solve(G, sys.Asw, TriSolveMode::left_forward);

  DenseMatrix E_nw, E_ww, approx_ww_update;
  // Norm of the perturbation actually applied to the compressed block; it
  // equals the tail up to roundoff and is what the bounds are stated for.
  double perturbation = 0.0;
  if (deferred_compression) {
    const TruncatedFactor tf = truncated_lowrank(Yw, eps, TruncationMode::absolute);
    rep.rank = tf.rank;
    rep.tail_norm = tf.tail_norm;
    const DenseMatrix kept = tf.U1 * tf.V1.transpose();
    perturbation = norm2(DenseMatrix(Yw - kept));
    approx_ww_update = tf.V1 * tf.V1.transpose();
    E_nw = Yn.transpose() * Yw - Yn.transpose() * kept;
    E_ww = Yw.transpose() * Yw - approx_ww_update;
    const DenseMatrix V2 = Yw.transpose() * tf.basis.rightCols(sys.ns() - tf.rank);
    const DenseMatrix V2V2 = V2 * V2.transpose();
    // Relative to tail^2, floored at the roundoff level of Yw^T Yw so that an
    // untruncated block (tail = 0) is not measured against zero.
    const double ref = std::max(tf.tail_norm * tf.tail_norm, 64.0 * kMachEps * norm2(Yw) * norm2(Yw));
    rep.identity_residual = norm2(DenseMatrix(E_ww - V2V2)) / ref;
    rep.ww_norm_deviation = std::abs(norm2(E_ww) - tf.tail_norm * tf.tail_norm) / ref;
  } else {
    const TruncatedFactor tf = truncated_lowrank(sys.Asw, eps, TruncationMode::absolute);
    rep.rank = tf.rank;
    rep.tail_norm = tf.tail_norm;
    const DenseMatrix kept = tf.U1 * tf.V1.transpose();
    perturbation = norm2(DenseMatrix(sys.Asw - kept));
    const DenseMatrix Yk = tri_solve(G, kept, TriSolveMode::left_forward);
    approx_ww_update = Yk.transpose() * Yk;
    E_nw = Yn.transpose() * Yw - Yn.transpose() * Yk;
    E_ww = Yw.transpose() * Yw - approx_ww_update;
  }

  const Index nn = sys.nn(), nw = sys.nw();
  DenseMatrix E = DenseMatrix::Zero(nn + nw, nn + nw);
  E.topRightCorner(nn, nw) = E_nw;
  E.bottomLeftCorner(nw, nn) = E_nw.transpose();
  E.bottomRightCorner(nw, nw) = E_ww;
  rep.E_nw_norm = norm2(E_nw);
  rep.E_ww_norm = norm2(E_ww);
  rep.E_norm = norm2(E);

  // Roundoff scale of the update terms whose difference forms E.
  const double yn = norm2(Yn), yw = norm2(Yw);
  const double slack_nw = 64.0 * kMachEps * yn * yw;
  const double slack_ww = 64.0 * kMachEps * yw * yw;

  const double tail = std::max(rep.tail_norm, perturbation);
  if (deferred_compression) {
    rep.bound_ww = tail * tail;
    rep.bound_nw = tail * rep.ans_norm / std::sqrt(rep.sigma_min);
    rep.bound_total = rep.bound_nw + tail * tail;
    rep.ww_satisfied = rep.E_ww_norm <= rep.bound_ww * (1.0 + kIdentityTolerance) + slack_ww;
  } else {
    rep.bound_ww = (2.0 * tail * rep.asw_norm + tail * tail) / rep.sigma_min;
    rep.bound_nw = tail * rep.ans_norm / rep.sigma_min;
    rep.bound_total = (tail * (2.0 * rep.asw_norm + rep.ans_norm) + tail * tail) / rep.sigma_min;
    rep.ww_satisfied = rep.E_ww_norm <= rep.bound_ww + slack_ww;
  }
  rep.nw_satisfied = rep.E_nw_norm <= rep.bound_nw + slack_nw;
  rep.total_satisfied = rep.E_norm <= rep.bound_total + slack_nw + slack_ww;

  rep.ww_min_eigenvalue = min_symmetric_eigenvalue(E_ww);
  rep.ww_psd = rep.ww_min_eigenvalue >= -(kIdentityTolerance * rep.E_ww_norm + slack_ww);
  DenseMatrix approx_ww = sys.Aww - approx_ww_update;
  approx_ww = (0.5 * (approx_ww + approx_ww.transpose())).eval();
  rep.approx_ww_spd = spd_check(approx_ww);
  return rep;
}

bool spd_check(const DenseMatrix& M) {
  try {
    dense_cholesky(M);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<double> default_eps_values() { return {1e-1, 1e-2, 1e-3, 1e-4}; }

PropsSummary run_props_suite(Index trials, std::uint64_t seed, const std::vector<double>& eps_values) {
  if (trials < 0) throw InvalidArgument("trials must be nonnegative");
  PropsSummary out;
  out.trials = trials;
  std::mt19937_64 rng(seed);
  for (Index t = 0; t < trials; ++t) {
    for (double eps : eps_values) {
      const BlockSystem sys = random_block_system(rng, eps);
      const ErrorReport off = schur_error_experiment(sys, eps, false);
      const ErrorReport on = schur_error_experiment(sys, eps, true);
      out.experiments += 2;
      if (!off.all_satisfied()) ++out.bound_failures;
      if (!on.all_satisfied()) ++out.bound_failures;
      if (!(on.ww_norm_deviation <= kIdentityTolerance && on.identity_residual <= kIdentityTolerance)) {
        ++out.identity_failures;
      }
      if (!on.ww_psd) ++out.psd_failures;
      const double slack = 64.0 * kMachEps * std::max(on.E_ww_norm, off.E_ww_norm);
      if (on.E_ww_norm > off.E_ww_norm + slack) ++out.dominance_failures;
      out.max_identity_deviation = std::max(out.max_identity_deviation, on.ww_norm_deviation);
      out.max_identity_residual = std::max(out.max_identity_residual, on.identity_residual);
      if (off.E_ww_norm > 0.0) {
        out.max_ww_ratio = std::max(out.max_ww_ratio, on.E_ww_norm / off.E_ww_norm);
      }
    }
  }
  return out;
}

CorollarySummary run_corollary_suite(Index trials, std::uint64_t seed,
                                     const std::vector<double>& eps_values) {
  if (trials < 0) throw InvalidArgument("trials must be nonnegative");
  CorollarySummary out;
  out.trials = trials;
  std::mt19937_64 rng(seed);
  for (Index t = 0; t < trials; ++t) {
    for (double eps : eps_values) {
      const BlockSystem sys = random_block_system(rng, eps);
      ++out.experiments;
      if (schur_error_experiment(sys, eps, true).approx_ww_spd) ++out.dc_on_spd;
      if (schur_error_experiment(sys, eps, false).approx_ww_spd) ++out.dc_off_spd;
    }
  }
  return out;
}

SparseSpdMatrix random_sparse_spd(Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("random_sparse_spd: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Coord> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = {uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0), 0.0};
  const double radius = std::sqrt(8.0 / (std::numbers::pi * static_cast<double>(n)));
  std::vector<Triplet> t;
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      const double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1];
      if (dx * dx + dy * dy > radius * radius) continue;
      const double w = uniform(rng, 0.1, 1.0) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      t.push_back({i, j, w});
      t.push_back({j, i, w});
      diag[i] += std::abs(w);
      diag[j] += std::abs(w);
    }
  }
  for (Index i = 0; i < n; ++i) t.push_back({i, i, diag[i] + uniform(rng, 0.01, 1.0)});
  return SparseSpdMatrix::from_triplets(n, std::move(t), std::move(pts));
}

bool ExactnessSummary::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const ExactnessCase& c) { return c.passed; });
}

SolverConfig exactness_config(bool deferred_compression) {
  SolverConfig cfg;
  cfg.eps = 0.0;
  cfg.target_cluster_size = 16;
  cfg.stop_size = 64;
  cfg.deferred_compression = deferred_compression;
  return cfg;
}

namespace {

ExactnessCase exactness_case(std::string name, const SparseSpdMatrix& A, std::mt19937_64& rng,
                             const FactorizationVisitor& visit) {
  ExactnessCase c;
  c.name = std::move(name);
  c.n = A.n();
  const HierFactorization fac = hierarchical_factor(A, exactness_config());
  if (visit) visit(fac);
  c.levels = static_cast<Index>(fac.levels.size());
  Vector b(A.n());
  std::normal_distribution<double> nd(0.0, 1.0);
  for (Index i = 0; i < A.n(); ++i) b[i] = nd(rng);
  const Vector xh = hierarchical_solve(fac, b);
  const Eigen::MatrixXd dense = A.to_dense();
  const Vector xd = dense.llt().solve(b);
  c.relative_error = (xh - xd).norm() / xd.norm();
  c.passed = c.relative_error <= kExactnessTolerance;
  return c;
}

}  // namespace

ExactnessSummary run_exactness_suite(Index trials, std::uint64_t seed, const FactorizationVisitor& visit) {
  if (trials < 0) throw InvalidArgument("trials must be nonnegative");
  ExactnessSummary out;
  std::mt19937_64 rng(seed);
  for (Index t = 0; t < trials; ++t) {
    const Index n = uniform_index(rng, 200, 1000);
    const SparseSpdMatrix A = random_sparse_spd(n, rng());
    out.cases.push_back(exactness_case("random_spd_" + std::to_string(t), A, rng, visit));
  }
  out.cases.push_back(exactness_case("aniso2d_16", gen_aniso2d(16, 1e-2), rng, visit));
  return out;
}

OperatorCheck spd_operator_check(const HierFactorization& fac, Index trials, std::uint64_t seed) {
  OperatorCheck out;
  out.trials = trials;
  out.min_rayleigh = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const Index n = fac.dimension;
  for (Index t = 0; t < trials; ++t) {
    Vector u(n), v(n);
    for (Index i = 0; i < n; ++i) u[i] = nd(rng);
    for (Index i = 0; i < n; ++i) v[i] = nd(rng);
    const Vector Mu = hierarchical_solve(fac, u);
    const Vector Mv = hierarchical_solve(fac, v);
    const double scale = 0.5 * (Mu.norm() * v.norm() + u.norm() * Mv.norm());
    const double asym = scale > 0.0 ? std::abs(Mu.dot(v) - u.dot(Mv)) / scale : 0.0;
    out.max_symmetry_error = std::max(out.max_symmetry_error, asym);
    out.min_rayleigh = std::min(out.min_rayleigh, Mv.dot(v) / v.squaredNorm());
  }
  if (trials == 0) out.min_rayleigh = 0.0;
  out.symmetric = out.max_symmetry_error <= kSymmetryTolerance;
  out.positive = trials == 0 || out.min_rayleigh > 0.0;
  return out;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nullopt;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = m * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (m * sxy - sx * sy) / den;
}

ScalingReport scaling_study(const ScalingFamily& family, const ScalingOptions& options) {
  if (family.kind != "aniso2d" && family.kind != "extruded3d") {
    throw InvalidArgument("unknown problem family '" + family.kind + "'");
  }
  if (family.sizes.empty()) throw InvalidArgument("scaling_study: no sizes given");
  if (!std::is_sorted(family.sizes.begin(), family.sizes.end())) {
    throw InvalidArgument("scaling_study: sizes must be ascending");
  }
  using Clock = std::chrono::steady_clock;
  ScalingReport rep;
  for (Index size : family.sizes) {
    SparseSpdMatrix A;
    ColumnMap colmap;
    if (family.kind == "aniso2d") {
      A = gen_aniso2d(size, family.eps_aniso);
    } else {
      ExtrudedProblem p =
          gen_extruded3d(size, size, family.layers, family.vert_weight, family.neumann_fraction);
      A = std::move(p.matrix);
      colmap = std::move(p.columns);
    }
    ScalingRow row;
    row.size_parameter = size;
    row.N = A.n();
    row.nnz = A.nnz();
    const Vector b = A.multiply(Vector::Ones(A.n()));

    Preconditioner precond;
    HierFactorization fac;
    std::optional<IncompleteCholesky> ic;
    const auto t0 = Clock::now();
    try {
      switch (options.precond) {
        case PrecondKind::hsolver:
          fac = hierarchical_factor(A, options.config,
                                    family.kind == "extruded3d" ? &colmap : nullptr);
          precond = make_preconditioner(fac);
          row.memory_bytes = fac.memory_bytes();
          for (const auto& s : fac.stats) {
            row.mean_rank_per_level.push_back(s.mean_rank);
            row.max_rank_per_level.push_back(s.max_rank);
          }
          break;
        case PrecondKind::ic0:
          ic = IncompleteCholesky::factor(A);
          precond = ic->as_preconditioner();
          break;
        case PrecondKind::none:
          precond = identity_preconditioner();
          break;
      }
    } catch (const Error& e) {
      row.factor_failed = true;
      row.failure = e.what();
      row.factor_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      rep.rows.push_back(std::move(row));
      continue;
    }
    row.factor_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    try {
      const KrylovResult res = pcg(A, b, precond, options.tol, options.maxit);
      row.iterations = res.report.iterations;
      row.converged = res.report.converged;
      row.solve_seconds = res.report.solve_seconds;
      row.solve_seconds_per_iter =
          row.iterations > 0 ? row.solve_seconds / static_cast<double>(row.iterations) : 0.0;
    } catch (const Error& e) {
      row.failure = e.what();
    }
    rep.rows.push_back(std::move(row));
  }

  std::vector<double> n_all, t_all, mem_all, n_conv, it_conv;
  for (const auto& r : rep.rows) {
    if (r.factor_failed) continue;
    n_all.push_back(static_cast<double>(r.N));
    t_all.push_back(std::max(r.factor_seconds, 1e-9));
    mem_all.push_back(static_cast<double>(r.memory_bytes));
    if (r.converged) {
      n_conv.push_back(static_cast<double>(r.N));
      it_conv.push_back(static_cast<double>(r.iterations));
    }
  }
  rep.factor_time_exponent = loglog_slope(n_all, t_all);
  rep.iteration_exponent = loglog_slope(n_conv, it_conv);
  rep.memory_exponent = loglog_slope(n_all, mem_all);
  return rep;
}

}  // namespace hsolve
