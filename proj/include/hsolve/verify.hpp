#pragma once

// Numerical checks of the one-step Schur complement analysis and empirical
// scaling studies of the multilevel solver.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hsolve/hfact.hpp"
#include "hsolve/kernels.hpp"
#include "hsolve/krylov.hpp"

namespace hsolve {

/// 3x3 block system over the index sets s (eliminated), n (neighbors) and
/// w (well-separated). Blocks below the diagonal are implied by symmetry.
struct BlockSystem {
  DenseMatrix Ass, Asn, Asw, Ann, Anw, Aww;

  Index ns() const { return Ass.rows(); }
  Index nn() const { return Ann.rows(); }
  Index nw() const { return Aww.rows(); }
  DenseMatrix assemble() const;
};

/// [[Ann, Anw], [Awn, Aww]] - [Ans; Aws] Ass^{-1} [Asn, Asw].
/// Throws NotPositiveDefinite when Ass is not SPD.
DenseMatrix exact_schur(const DenseMatrix& Ass, const DenseMatrix& Asn, const DenseMatrix& Asw,
                        const DenseMatrix& Ann, const DenseMatrix& Anw, const DenseMatrix& Aww);
DenseMatrix exact_schur(const BlockSystem& sys);

struct BlockSystemSpec {
  Index min_block = 5;
  Index max_block = 50;
  double min_sigma = 1e-8;  // sigma_min(Ass) is drawn log-uniformly in [min_sigma, max_sigma]
  double max_sigma = 1.0;
};

/// Random SPD block system. Ass = Q diag(sigma) Q^T with ||Ass|| = max_sigma,
/// Asw = G M with the singular values of M decaying geometrically from a
/// leading value a few times `eps`, Asn = G N, and the n/w blocks chosen as
/// [N M]^T [N M] + C so that the exact Schur complement is the random SPD C.
BlockSystem random_block_system(std::mt19937_64& rng, double eps, const BlockSystemSpec& spec = {});

struct ErrorReport {
  bool deferred_compression = false;
  double eps = 0.0;
  Index rank = 0;
  double tail_norm = 0.0;  // 2-norm of the dropped part of the compressed block
  double sigma_min = 0.0;  // of Ass
  double sigma_max = 0.0;
  double asw_norm = 0.0;
  double ans_norm = 0.0;
  double asn_norm = 0.0;

  double E_nw_norm = 0.0;
  double E_ww_norm = 0.0;
  double E_norm = 0.0;
  double bound_nw = 0.0;
  double bound_ww = 0.0;
  double bound_total = 0.0;
  bool nw_satisfied = false;
  bool ww_satisfied = false;
  bool total_satisfied = false;

  /// Smallest eigenvalue of the symmetric part of E_ww, and whether it is
  /// nonnegative up to roundoff.
  double ww_min_eigenvalue = 0.0;
  bool ww_psd = false;
  /// Deferred compression only: ||E_ww - V2 V2^T|| and |E_ww_norm - tail^2|,
  /// both divided by tail^2 (or by the roundoff level when the tail vanishes).
  double identity_residual = 0.0;
  double ww_norm_deviation = 0.0;
  /// ww block of the approximate Schur complement is SPD.
  bool approx_ww_spd = false;

  bool all_satisfied() const { return nw_satisfied && ww_satisfied && total_satisfied; }
};

/// Relative tolerance for the Ê_ww identities.
inline constexpr double kIdentityTolerance = 1e-10;

/// Compresses Asw (dc off) or G^{-1} Asw (dc on) with absolute tolerance
/// eps, forms the approximate Schur complement and compares it with the
/// exact one. Bounds use the norm of the perturbation actually applied to the
/// compressed block (the tail, up to roundoff) as the truncation error.
ErrorReport schur_error_experiment(const BlockSystem& sys, double eps, bool deferred_compression);

/// True iff dense_cholesky succeeds.
bool spd_check(const DenseMatrix& M);

struct PropsSummary {
  Index trials = 0;
  Index experiments = 0;     // trials x eps values x {off, on}
  Index bound_failures = 0;  // any error bound violated
  Index identity_failures = 0;
  Index psd_failures = 0;
  Index dominance_failures = 0;  // dc-on ww error above dc-off ww error
  double max_identity_deviation = 0.0;
  double max_identity_residual = 0.0;
  double max_ww_ratio = 0.0;  // max over trials of on/off ww error
  bool passed() const {
    return bound_failures == 0 && identity_failures == 0 && psd_failures == 0 &&
           dominance_failures == 0;
  }
};

std::vector<double> default_eps_values();

PropsSummary run_props_suite(Index trials, std::uint64_t seed,
                             const std::vector<double>& eps_values = default_eps_values());

struct CorollarySummary {
  Index trials = 0;
  Index experiments = 0;
  Index dc_on_spd = 0;   // ww block of the dc-on Schur complement is SPD
  Index dc_off_spd = 0;  // same without deferred compression (informative)
  bool passed() const { return dc_on_spd == experiments; }
};

CorollarySummary run_corollary_suite(Index trials, std::uint64_t seed,
                                     const std::vector<double>& eps_values = default_eps_values());

/// Diagonally dominant SPD matrix on a random geometric graph with random
/// coupling signs; carries coordinates.
SparseSpdMatrix random_sparse_spd(Index n, std::uint64_t seed);

struct ExactnessCase {
  std::string name;
  Index n = 0;
  Index levels = 0;
  double relative_error = 0.0;  // ||x_h - x_dense|| / ||x_dense||
  bool passed = false;
};

struct ExactnessSummary {
  std::vector<ExactnessCase> cases;
  bool passed() const;
};

inline constexpr double kExactnessTolerance = 1e-10;

/// Called on each factorization a suite builds.
using FactorizationVisitor = std::function<void(const HierFactorization&)>;

/// eps = 0 factorization versus dense Cholesky on `trials` random matrices
/// and on gen_aniso2d(16, 1e-2).
ExactnessSummary run_exactness_suite(Index trials, std::uint64_t seed,
                                     const FactorizationVisitor& visit = {});

/// Small clusters and stop size so the exactness checks exercise several levels.
SolverConfig exactness_config(bool deferred_compression = true);

struct OperatorCheck {
  Index trials = 0;
  double max_symmetry_error = 0.0;  // |<Mu,v> - <u,Mv>| / (||Mu|| ||v|| + ||u|| ||Mv||) * 2
  double min_rayleigh = 0.0;        // min <Mv,v> / ||v||^2
  bool symmetric = false;
  bool positive = false;
  bool passed() const { return symmetric && positive; }
};

inline constexpr double kSymmetryTolerance = 1e-10;

/// Symmetry and positivity of the map r -> hierarchical_solve(fac, r) on
/// random vectors.
OperatorCheck spd_operator_check(const HierFactorization& fac, Index trials, std::uint64_t seed);

enum class PrecondKind { hsolver, ic0, none };

struct ScalingRow {
  Index size_parameter = 0;
  Index N = 0;
  Index nnz = 0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  double solve_seconds_per_iter = 0.0;
  Index iterations = 0;
  bool converged = false;
  bool factor_failed = false;
  std::string failure;
  std::vector<double> mean_rank_per_level;
  std::vector<Index> max_rank_per_level;
  std::size_t memory_bytes = 0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  /// log-log slopes against N; empty when fewer than two usable rows.
  std::optional<double> factor_time_exponent;
  std::optional<double> iteration_exponent;
  std::optional<double> memory_exponent;
  bool exponents_defined() const { return factor_time_exponent.has_value(); }
};

struct ScalingFamily {
  std::string kind = "aniso2d";  // aniso2d | extruded3d
  std::vector<Index> sizes;      // n for aniso2d, nx = ny for extruded3d
  double eps_aniso = 1e-4;
  Index layers = 8;
  double vert_weight = 1e3;
  double neumann_fraction = 0.5;
};

struct ScalingOptions {
  SolverConfig config;
  PrecondKind precond = PrecondKind::hsolver;
  double tol = 1e-12;
  Index maxit = 1000;
};

/// Runs factor + PCG with b = A * 1 on each member of the family.
ScalingReport scaling_study(const ScalingFamily& family, const ScalingOptions& options);

/// Least-squares slope of log(y) against log(x); empty for fewer than two
/// points or nonpositive data.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hsolve
