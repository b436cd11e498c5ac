#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hsolve/problems.hpp"

namespace hsolve::cli {

using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const NotPositiveDefinite*>(&e)) return "NotPositiveDefinite";
  if (dynamic_cast<const SingularTriangular*>(&e)) return "SingularTriangular";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const NotSymmetric*>(&e)) return "NotSymmetric";
  if (dynamic_cast<const NonPositiveDiagonal*>(&e)) return "NonPositiveDiagonal";
  if (dynamic_cast<const PartitionMismatch*>(&e)) return "PartitionMismatch";
  if (dynamic_cast<const ColumnSplitRequired*>(&e)) return "ColumnSplitRequired";
  if (dynamic_cast<const DiagonalNotSPD*>(&e)) return "DiagonalNotSPD";
  if (dynamic_cast<const PreconditionerNotPositive*>(&e)) return "PreconditionerNotPositive";
  if (dynamic_cast<const BreakdownNonpositivePivot*>(&e)) return "BreakdownNonpositivePivot";
  if (dynamic_cast<const DimensionError*>(&e)) return "DimensionError";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "InternalError";
}

json envelope(const std::string& status, json config, json report) {
  json j;
  j["status"] = status;
  j["config"] = std::move(config);
  j["report"] = std::move(report);
  return j;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

int fail(std::ostream& out, std::ostream& err, json config, const std::exception& e, int code) {
  err << "hsolve: " << e.what() << '\n';
  json j = envelope("error", std::move(config), nullptr);
  j["error"] = error_to_json(e);
  emit(out, j);
  return code;
}

// ---- generate --------------------------------------------------------------

struct GenerateArgs {
  std::string kind;
  std::string out;
  Index n = 32;
  double eps_aniso = 1e-4;
  Index nx = 16, ny = 16, layers = 8;
  double vert_weight = 1e3;
  double neumann_fraction = 0.0;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  json config = {{"command", "generate"}, {"kind", a.kind}, {"out", a.out}};
  try {
    json report;
    std::vector<std::string> files;
    if (a.kind == "aniso2d") {
      config["n"] = a.n;
      config["eps_aniso"] = a.eps_aniso;
      const SparseSpdMatrix A = gen_aniso2d(a.n, a.eps_aniso);
      save_matrix_market(A, a.out + ".mtx");
      save_coords(A.coords(), a.out + ".coords");
      files = {a.out + ".mtx", a.out + ".coords"};
      report = {{"n", A.n()}, {"nnz", A.nnz()}};
    } else if (a.kind == "extruded3d") {
      config.update({{"nx", a.nx},
                     {"ny", a.ny},
                     {"layers", a.layers},
                     {"vert_weight", a.vert_weight},
                     {"neumann_fraction", a.neumann_fraction}});
      const ExtrudedProblem p = gen_extruded3d(a.nx, a.ny, a.layers, a.vert_weight, a.neumann_fraction);
      save_matrix_market(p.matrix, a.out + ".mtx");
      save_coords(p.matrix.coords(), a.out + ".coords");
      save_column_map(p.columns, a.out + ".colmap");
      files = {a.out + ".mtx", a.out + ".coords", a.out + ".colmap"};
      report = {{"n", p.matrix.n()}, {"nnz", p.matrix.nnz()}, {"columns", p.columns.column_count()}};
    } else {
      throw InvalidArgument("unknown problem kind '" + a.kind + "' (expected aniso2d or extruded3d)");
    }
    report["files"] = files;
    emit(out, envelope("ok", config, report));
    return kOk;
  } catch (const std::exception& e) {
    return fail(out, err, config, e, kFailure);
  }
}

// ---- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string matrix;
  std::string rhs;
  std::string coords;
  std::string colmap;
  double eps = 1e-2;
  std::string eps_mode = "abs";
  Index cluster_size = 100;
  Index stop_size = 500;
  bool no_dc = false;
  std::string partitioner = "general";
  std::string krylov = "pcg";
  Index restart = 200;
  double tol = 1e-12;
  Index maxit = 1000;
  std::string precond = "hsolver";
  std::uint64_t seed = 0;
  double jitter = 0.0;
};

SolverConfig solver_config(double eps, const std::string& eps_mode, Index cluster, Index stop,
                           bool no_dc, const std::string& partitioner, double jitter) {
  SolverConfig c;
  c.eps = eps;
  c.eps_mode = eps_mode == "rel" ? TruncationMode::relative : TruncationMode::absolute;
  c.target_cluster_size = cluster;
  c.stop_size = std::max(stop, cluster);
  c.deferred_compression = !no_dc;
  c.partitioner = partitioner == "extruded" ? PartitionerKind::extruded : PartitionerKind::general;
  c.jitter = jitter;
  return c;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const SolverConfig cfg = solver_config(a.eps, a.eps_mode, a.cluster_size, a.stop_size, a.no_dc,
                                         a.partitioner, a.jitter);
  json config = {{"command", "solve"},  {"matrix", a.matrix},   {"rhs", a.rhs.empty() ? json("A*1") : json(a.rhs)},
                 {"krylov", a.krylov},  {"restart", a.restart}, {"tol", a.tol},
                 {"maxit", a.maxit},    {"precond", a.precond}, {"seed", a.seed},
                 {"solver", to_json(cfg)}};

  SparseSpdMatrix A;
  ColumnMap colmap;
  Vector b;
  std::optional<Vector> x_true;
  try {
    A = load_matrix_market(a.matrix);
    std::string coords_path = a.coords;
    if (coords_path.empty()) {
      std::filesystem::path guess(a.matrix);
      guess.replace_extension(".coords");
      if (std::filesystem::exists(guess)) coords_path = guess.string();
    }
    if (!coords_path.empty()) A.set_coords(load_coords(coords_path));
    config["coords"] = coords_path.empty() ? json(nullptr) : json(coords_path);
    if (cfg.partitioner == PartitionerKind::extruded) {
      if (a.colmap.empty()) throw InvalidArgument("--partitioner extruded needs --colmap");
      colmap = load_column_map(a.colmap);
    }
    config["colmap"] = a.colmap.empty() ? json(nullptr) : json(a.colmap);
    if (a.rhs.empty()) {
      x_true = Vector::Ones(A.n());
      b = A.multiply(*x_true);
    } else if (a.rhs == "random") {
      std::mt19937_64 rng(a.seed);
      std::normal_distribution<double> nd(0.0, 1.0);
      b.resize(A.n());
      for (Index i = 0; i < A.n(); ++i) b[i] = nd(rng);
    } else {
      b = load_vector(a.rhs);
      if (b.size() != A.n()) {
        throw DimensionError("right-hand side has " + std::to_string(b.size()) + " entries, matrix has " +
                             std::to_string(A.n()) + " rows");
      }
    }
  } catch (const std::exception& e) {
    return fail(out, err, config, e, kFailure);
  }

  HierFactorization fac;
  std::optional<IncompleteCholesky> ic;
  Preconditioner precond;
  SolveReport pre;
  json extra = {{"n", A.n()}, {"nnz", A.nnz()}};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (a.precond == "hsolver") {
      fac = hierarchical_factor(A, cfg, cfg.partitioner == PartitionerKind::extruded ? &colmap : nullptr);
      precond = make_preconditioner(fac);
      pre.level_stats = fac.stats;
      pre.memory_estimate_bytes = fac.memory_bytes();
      extra["levels"] = fac.levels.size();
      extra["top_dimension"] = fac.top_dimension();
      extra["warnings"] = fac.warnings;
    } else if (a.precond == "ic0") {
      ic = IncompleteCholesky::factor(A);
      precond = ic->as_preconditioner();
    } else {
      precond = identity_preconditioner();
    }
  } catch (const std::exception& e) {
    return fail(out, err, config, e, kFailure);
  }
  pre.factor_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  try {
    KrylovResult res = a.krylov == "gmres" ? gmres(A, b, precond, a.restart, a.tol, a.maxit)
                                           : pcg(A, b, precond, a.tol, a.maxit);
    res.report.factor_seconds = pre.factor_seconds;
    res.report.level_stats = pre.level_stats;
    res.report.memory_estimate_bytes = pre.memory_estimate_bytes;
    json report = to_json(res.report);
    report.update(extra);
    report["true_error"] =
        x_true ? finite_or_null((res.x - *x_true).norm() / x_true->norm()) : json(nullptr);
    const bool ok = res.report.converged;
    emit(out, envelope(ok ? "converged" : "not_converged", config, report));
    return ok ? kOk : kNotConverged;
  } catch (const std::exception& e) {
    err << "hsolve: " << e.what() << '\n';
    pre.solve_seconds = 0.0;
    json report = to_json(pre);
    report.update(extra);
    json j = envelope("not_converged", config, report);
    j["error"] = error_to_json(e);
    emit(out, j);
    return kNotConverged;
  }
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  std::optional<Index> trials;
  std::uint64_t seed = 42;
};

json props_json(const PropsSummary& s) {
  return {{"passed", s.passed()},
          {"trials", s.trials},
          {"experiments", s.experiments},
          {"bound_failures", s.bound_failures},
          {"identity_failures", s.identity_failures},
          {"psd_failures", s.psd_failures},
          {"dominance_failures", s.dominance_failures},
          {"max_identity_deviation", finite_or_null(s.max_identity_deviation)},
          {"max_identity_residual", finite_or_null(s.max_identity_residual)},
          {"max_ww_ratio_on_over_off", finite_or_null(s.max_ww_ratio)}};
}

json corollary_json(const CorollarySummary& s) {
  return {{"passed", s.passed()},
          {"trials", s.trials},
          {"experiments", s.experiments},
          {"dc_on_ww_spd", s.dc_on_spd},
          {"dc_off_ww_spd", s.dc_off_spd}};
}

json exactness_json(const ExactnessSummary& s) {
  json cases = json::array();
  for (const auto& c : s.cases) {
    cases.push_back({{"name", c.name},
                     {"n", c.n},
                     {"levels", c.levels},
                     {"relative_error", finite_or_null(c.relative_error)},
                     {"passed", c.passed}});
  }
  return {{"passed", s.passed()}, {"tolerance", kExactnessTolerance}, {"cases", cases}};
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  json config = {{"command", "verify"}, {"suite", a.suite}, {"seed", a.seed},
                 {"trials", a.trials ? json(*a.trials) : json(nullptr)}};
  try {
    if (a.trials && *a.trials < 0) throw InvalidArgument("--trials must be nonnegative");
    const bool all = a.suite == "all";
    json report;
    bool passed = true;
    if (all || a.suite == "props") {
      const PropsSummary s = run_props_suite(a.trials.value_or(200), a.seed);
      report["props"] = props_json(s);
      passed = passed && s.passed();
    }
    if (all || a.suite == "corollary") {
      const CorollarySummary s = run_corollary_suite(a.trials.value_or(200), a.seed);
      report["corollary"] = corollary_json(s);
      passed = passed && s.passed();
    }
    if (all || a.suite == "exactness") {
      const Index trials = a.trials.value_or(5);
      ExactnessSummary s;
      if (trials > 0) s = run_exactness_suite(trials, a.seed);
      report["exactness"] = exactness_json(s);
      passed = passed && s.passed();
    }
    if (report.is_null()) throw InvalidArgument("unknown suite '" + a.suite + "'");
    report["passed"] = passed;
    emit(out, envelope(passed ? "passed" : "failed", config, report));
    return passed ? kOk : kNotConverged;
  } catch (const std::exception& e) {
    return fail(out, err, config, e, kFailure);
  }
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  ScalingFamily family;
  std::string sizes = "32,64,128";
  double eps = 1e-2;
  std::string eps_mode = "abs";
  Index cluster_size = 100;
  Index stop_size = 500;
  bool no_dc = false;
  bool compare_dc = false;
  std::string precond = "hsolver";
  double tol = 1e-12;
  Index maxit = 1000;
};

std::vector<Index> parse_sizes(const std::string& s) {
  std::vector<Index> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || v < 1) throw InvalidArgument("invalid size '" + tok + "' in --sizes");
    out.push_back(static_cast<Index>(v));
  }
  if (out.empty()) throw InvalidArgument("--sizes is empty");
  return out;
}

int cmd_bench(BenchArgs a, std::ostream& out, std::ostream& err) {
  json config = {{"command", "bench"}, {"family", a.family.kind}, {"sizes", a.sizes},
                 {"precond", a.precond}, {"tol", a.tol}, {"maxit", a.maxit}};
  try {
    if (a.family.kind != "aniso2d" && a.family.kind != "extruded3d") {
      throw InvalidArgument("unknown family '" + a.family.kind + "' (expected aniso2d or extruded3d)");
    }
    a.family.sizes = parse_sizes(a.sizes);
    config["eps_aniso"] = a.family.eps_aniso;
    if (a.family.kind == "extruded3d") {
      config.update({{"layers", a.family.layers},
                     {"vert_weight", a.family.vert_weight},
                     {"neumann_fraction", a.family.neumann_fraction}});
    }
    ScalingOptions opt;
    opt.config = solver_config(a.eps, a.eps_mode, a.cluster_size, a.stop_size, a.no_dc,
                               a.family.kind == "extruded3d" ? "extruded" : "general", 0.0);
    opt.precond = a.precond == "ic0" ? PrecondKind::ic0
                  : a.precond == "none" ? PrecondKind::none
                                        : PrecondKind::hsolver;
    opt.tol = a.tol;
    opt.maxit = a.maxit;
    config["solver"] = to_json(opt.config);
    json report;
    if (a.compare_dc) {
      opt.config.deferred_compression = true;
      report["dc_on"] = to_json(scaling_study(a.family, opt));
      opt.config.deferred_compression = false;
      report["dc_off"] = to_json(scaling_study(a.family, opt));
    } else {
      report = to_json(scaling_study(a.family, opt));
    }
    emit(out, envelope("ok", config, report));
    return kOk;
  } catch (const std::exception& e) {
    return fail(out, err, config, e, kFailure);
  }
}

}  // namespace

json error_to_json(const std::exception& e) {
  json j = {{"type", error_type(e)}, {"message", e.what()}};
  if (const auto* d = dynamic_cast<const DiagonalNotSPD*>(&e)) {
    j.update({{"level", d->level}, {"cluster", d->cluster}, {"pivot", d->pivot},
              {"pivot_value", finite_or_null(d->pivot_value)}, {"eps", d->eps}});
  } else if (const auto* p = dynamic_cast<const NotPositiveDefinite*>(&e)) {
    j.update({{"pivot", p->pivot_index}, {"pivot_value", finite_or_null(p->pivot_value)}});
  } else if (const auto* q = dynamic_cast<const ParseError*>(&e)) {
    j["line"] = q->line;
  } else if (const auto* c = dynamic_cast<const ColumnSplitRequired*>(&e)) {
    j["column"] = c->column;
  } else if (const auto* b = dynamic_cast<const BreakdownNonpositivePivot*>(&e)) {
    j["row"] = b->row;
  }
  return j;
}

json to_json(const SolverConfig& c) {
  return {{"eps", c.eps},
          {"eps_mode", c.eps_mode == TruncationMode::relative ? "rel" : "abs"},
          {"cluster_size", c.target_cluster_size},
          {"stop_size", c.stop_size},
          {"deferred_compression", c.deferred_compression},
          {"partitioner", c.partitioner == PartitionerKind::extruded ? "extruded" : "general"},
          {"jitter", c.jitter}};
}

json to_json(const LevelStats& s) {
  return {{"level", s.level},
          {"dimension", s.dimension},
          {"clusters", s.clusters},
          {"coarse_dimension", s.coarse_dimension},
          {"mean_cluster_size", finite_or_null(s.mean_cluster_size)},
          {"mean_rank", finite_or_null(s.mean_rank)},
          {"max_rank", s.max_rank},
          {"compressed_clusters", s.compressed_clusters},
          {"seconds", finite_or_null(s.seconds)}};
}

json to_json(const SolveReport& r) {
  json hist = json::array();
  for (double v : r.residual_history) hist.push_back(finite_or_null(v));
  json levels = json::array();
  for (const auto& s : r.level_stats) levels.push_back(to_json(s));
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"residual_history", hist},
          {"final_relres", r.residual_history.empty() ? json(nullptr) : finite_or_null(r.final_relres)},
          {"factor_seconds", finite_or_null(r.factor_seconds)},
          {"solve_seconds", finite_or_null(r.solve_seconds)},
          {"level_stats", levels},
          {"memory_estimate_bytes", r.memory_estimate_bytes}};
}

json to_json(const ScalingReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json ranks = json::array();
    for (double m : row.mean_rank_per_level) ranks.push_back(finite_or_null(m));
    rows.push_back({{"size", row.size_parameter},
                    {"N", row.N},
                    {"nnz", row.nnz},
                    {"factor_seconds", finite_or_null(row.factor_seconds)},
                    {"solve_seconds", finite_or_null(row.solve_seconds)},
                    {"solve_seconds_per_iter", finite_or_null(row.solve_seconds_per_iter)},
                    {"iterations", row.iterations},
                    {"converged", row.converged},
                    {"factor_failed", row.factor_failed},
                    {"failure", row.failure.empty() ? json(nullptr) : json(row.failure)},
                    {"mean_rank_per_level", ranks},
                    {"max_rank_per_level", row.max_rank_per_level},
                    {"memory_bytes", row.memory_bytes}});
  }
  auto opt = [](const std::optional<double>& v) { return v ? finite_or_null(*v) : json(nullptr); };
  return {{"rows", rows},
          {"exponents_defined", r.exponents_defined()},
          {"factor_time_exponent", opt(r.factor_time_exponent)},
          {"iteration_exponent", opt(r.iteration_exponent)},
          {"memory_exponent", opt(r.memory_exponent)}};
}

Vector load_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<double> vals;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(v)) throw ParseError(line_no, "invalid number '" + tok + "'");
      vals.push_back(v);
    }
  }
  return Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical sparse SPD solver with deferred compression", "hsolve"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a model problem as <prefix>.mtx/.coords[/.colmap]");
  g->add_option("kind", gen.kind, "aniso2d | extruded3d")->required();
  g->add_option("--out,-o", gen.out, "Output prefix")->required();
  g->add_option("--n", gen.n, "aniso2d grid size")->capture_default_str();
  g->add_option("--eps-aniso", gen.eps_aniso, "aniso2d anisotropy")->capture_default_str();
  g->add_option("--nx", gen.nx)->capture_default_str();
  g->add_option("--ny", gen.ny)->capture_default_str();
  g->add_option("--layers", gen.layers)->capture_default_str();
  g->add_option("--vert-weight", gen.vert_weight)->capture_default_str();
  g->add_option("--neumann-fraction", gen.neumann_fraction, "Fraction of Neumann bottom columns")
      ->capture_default_str();

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Solve A x = b and print a JSON report");
  s->add_option("matrix", sol.matrix, "MatrixMarket file")->required();
  s->add_option("rhs", sol.rhs, "Right-hand side file, or 'random' (default b = A*1)");
  s->add_option("--coords", sol.coords, "Coordinate file (default <matrix>.coords if present)");
  s->add_option("--colmap", sol.colmap, "Column map for the extruded partitioner");
  s->add_option("--eps", sol.eps, "Truncation tolerance")->capture_default_str();
  s->add_option("--eps-mode", sol.eps_mode, "abs | rel")
      ->check(CLI::IsMember({"abs", "rel"}))
      ->capture_default_str();
  s->add_option("--cluster-size", sol.cluster_size)->capture_default_str();
  s->add_option("--stop-size", sol.stop_size, "Factor densely at or below this size")->capture_default_str();
  s->add_flag("--no-dc", sol.no_dc, "Disable deferred compression");
  s->add_option("--partitioner", sol.partitioner)
      ->check(CLI::IsMember({"general", "extruded"}))
      ->capture_default_str();
  s->add_option("--krylov", sol.krylov)->check(CLI::IsMember({"pcg", "gmres"}))->capture_default_str();
  s->add_option("--restart", sol.restart)->capture_default_str();
  s->add_option("--tol", sol.tol)->capture_default_str();
  s->add_option("--maxit", sol.maxit)->capture_default_str();
  s->add_option("--precond", sol.precond)
      ->check(CLI::IsMember({"hsolver", "ic0", "none"}))
      ->capture_default_str();
  s->add_option("--seed", sol.seed, "Seed for a random right-hand side")->capture_default_str();
  s->add_option("--jitter", sol.jitter, "Diagonal shift added before each cluster Cholesky")
      ->capture_default_str();

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Run a verification suite");
  v->add_option("--suite", ver.suite)
      ->check(CLI::IsMember({"props", "corollary", "exactness", "all"}))
      ->capture_default_str();
  v->add_option("--trials", ver.trials, "Trials (default 200, exactness 5)");
  v->add_option("--seed", ver.seed)->capture_default_str();

  BenchArgs ben;
  auto* b = app.add_subcommand("bench", "Scaling study over a problem family");
  b->add_option("--family", ben.family.kind, "aniso2d | extruded3d")->capture_default_str();
  b->add_option("--sizes", ben.sizes, "Comma-separated n (aniso2d) or nx = ny (extruded3d)")
      ->capture_default_str();
  b->add_option("--eps-aniso", ben.family.eps_aniso)->capture_default_str();
  b->add_option("--layers", ben.family.layers)->capture_default_str();
  b->add_option("--vert-weight", ben.family.vert_weight)->capture_default_str();
  b->add_option("--neumann-fraction", ben.family.neumann_fraction)->capture_default_str();
  b->add_option("--eps", ben.eps)->capture_default_str();
  b->add_option("--eps-mode", ben.eps_mode)->check(CLI::IsMember({"abs", "rel"}))->capture_default_str();
  b->add_option("--cluster-size", ben.cluster_size)->capture_default_str();
  b->add_option("--stop-size", ben.stop_size)->capture_default_str();
  b->add_flag("--no-dc", ben.no_dc);
  b->add_flag("--compare-dc", ben.compare_dc, "Run with and without deferred compression");
  b->add_option("--precond", ben.precond)
      ->check(CLI::IsMember({"hsolver", "ic0", "none"}))
      ->capture_default_str();
  b->add_option("--tol", ben.tol)->capture_default_str();
  b->add_option("--maxit", ben.maxit)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "hsolve: " << e.what() << "\n" << app.help();
    json j = envelope("error", json{{"args", args}}, nullptr);
    j["error"] = {{"type", "UsageError"}, {"message", e.what()}};
    emit(out, j);
    return kFailure;
  }

  if (*g) return cmd_generate(gen, out, err);
  if (*s) return cmd_solve(sol, out, err);
  if (*v) return cmd_verify(ver, out, err);
  return cmd_bench(ben, out, err);
}

}  // namespace hsolve::cli
