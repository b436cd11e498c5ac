#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hsolve/hfact.hpp"
#include "hsolve/krylov.hpp"
#include "hsolve/problems.hpp"
#include "hsolve/verify.hpp"

namespace py = pybind11;
using namespace hsolve;

namespace {

SparseSpdMatrix from_csr(Index n, const std::vector<Index>& indptr, const std::vector<Index>& indices,
                         const std::vector<double>& data, std::optional<Eigen::MatrixXd> coords) {
  if (static_cast<Index>(indptr.size()) != n + 1) throw DimensionError("indptr must have n + 1 entries");
  if (indices.size() != data.size()) throw DimensionError("indices and data differ in length");
  std::vector<Triplet> t;
  t.reserve(data.size());
  for (Index i = 0; i < n; ++i) {
    for (Index p = indptr[i]; p < indptr[i + 1]; ++p) t.push_back({i, indices[p], data[p]});
  }
  std::vector<Coord> c;
  if (coords) {
    if (coords->rows() != n || coords->cols() < 1 || coords->cols() > 3) {
      throw DimensionError("coords must be n x 1..3");
    }
    c.resize(n, Coord{0.0, 0.0, 0.0});
    for (Index i = 0; i < n; ++i)
      for (Index d = 0; d < coords->cols(); ++d) c[i][d] = (*coords)(i, d);
  }
  return SparseSpdMatrix::from_triplets(n, std::move(t), std::move(c));
}

py::dict level_stats_dict(const LevelStats& s) {
  py::dict d;
  d["level"] = s.level;
  d["dimension"] = s.dimension;
  d["clusters"] = s.clusters;
  d["coarse_dimension"] = s.coarse_dimension;
  d["mean_cluster_size"] = s.mean_cluster_size;
  d["mean_rank"] = s.mean_rank;
  d["max_rank"] = s.max_rank;
  d["compressed_clusters"] = s.compressed_clusters;
  d["max_identity_residual"] = s.max_identity_residual;
  d["seconds"] = s.seconds;
  return d;
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["residual_history"] = r.residual_history;
  d["final_relres"] = r.final_relres;
  d["solve_seconds"] = r.solve_seconds;
  return d;
}

py::tuple krylov(const SparseSpdMatrix& A, const Vector& b, const py::object& precond, const std::string& method,
                 double tol, Index maxit, Index restart) {
  Preconditioner M;
  std::optional<IncompleteCholesky> ic;
  if (precond.is_none()) {
    M = identity_preconditioner();
  } else if (py::isinstance<py::str>(precond)) {
    const auto name = precond.cast<std::string>();
    if (name == "none") {
      M = identity_preconditioner();
    } else if (name == "ic0") {
      ic = IncompleteCholesky::factor(A);
      M = ic->as_preconditioner();
    } else {
      throw InvalidArgument("precond must be a factorization, 'ic0', 'none' or None");
    }
  } else {
    M = make_preconditioner(precond.cast<const HierFactorization&>());
  }
  KrylovResult res;
  {
    py::gil_scoped_release release;
    if (method == "pcg") {
      res = pcg(A, b, M, tol, maxit);
    } else if (method == "gmres") {
      res = gmres(A, b, M, restart, tol, maxit);
    } else {
      throw InvalidArgument("method must be 'pcg' or 'gmres'");
    }
  }
  return py::make_tuple(res.x, report_dict(res.report));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hierarchical SPD solver with deferred compression";

  auto base = py::register_exception<Error>(m, "HsolveError", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<NotSymmetric>(m, "NotSymmetric", base);
  py::register_exception<NonPositiveDiagonal>(m, "NonPositiveDiagonal", base);
  py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", base);
  py::register_exception<PartitionMismatch>(m, "PartitionMismatch", base);
  py::register_exception<ColumnSplitRequired>(m, "ColumnSplitRequired", base);
  py::register_exception<DiagonalNotSPD>(m, "DiagonalNotSPD", base);
  py::register_exception<PreconditionerNotPositive>(m, "PreconditionerNotPositive", base);
  py::register_exception<BreakdownNonpositivePivot>(m, "BreakdownNonpositivePivot", base);

  py::class_<SparseSpdMatrix>(m, "SparseSpdMatrix")
      .def_property_readonly("n", &SparseSpdMatrix::n)
      .def_property_readonly("nnz", &SparseSpdMatrix::nnz)
      .def("to_dense", [](const SparseSpdMatrix& A) { return Eigen::MatrixXd(A.to_dense()); })
      .def("matvec", [](const SparseSpdMatrix& A, const Vector& x) {
        if (x.size() != A.n()) throw DimensionError("matvec: size mismatch");
        return A.multiply(x);
      })
      .def("csr",
           [](const SparseSpdMatrix& A) {
             const auto p = A.row_offsets(), c = A.col_indices();
             const auto v = A.values();
             return py::make_tuple(std::vector<Index>(p.begin(), p.end()), std::vector<Index>(c.begin(), c.end()),
                                   std::vector<double>(v.begin(), v.end()));
           },
           "(indptr, indices, data) with both triangles stored")
      .def_property_readonly("coords",
                             [](const SparseSpdMatrix& A) {
                               Eigen::MatrixXd C(static_cast<Index>(A.coords().size()), 3);
                               for (Index i = 0; i < C.rows(); ++i)
                                 for (int d = 0; d < 3; ++d) C(i, d) = A.coords()[i][d];
                               return C;
                             })
      .def("__repr__", [](const SparseSpdMatrix& A) {
        return "<SparseSpdMatrix n=" + std::to_string(A.n()) + " nnz=" + std::to_string(A.nnz()) + ">";
      });

  m.def("from_csr", &from_csr, py::arg("n"), py::arg("indptr"), py::arg("indices"), py::arg("data"),
        py::arg("coords") = py::none(), "Build from CSR arrays holding both triangles.");
  m.def("identity", &SparseSpdMatrix::identity, py::arg("n"));
  m.def("load_matrix_market", &load_matrix_market, py::arg("path"));
  m.def("save_matrix_market", &save_matrix_market, py::arg("matrix"), py::arg("path"));

  py::class_<ColumnMap>(m, "ColumnMap")
      .def_readonly("index_to_column", &ColumnMap::index_to_column)
      .def_readonly("layers", &ColumnMap::layers)
      .def("column_count", &ColumnMap::column_count);
  m.def("load_column_map", &load_column_map, py::arg("path"));

  m.def("gen_aniso2d", &gen_aniso2d, py::arg("n"), py::arg("eps_aniso"));
  m.def("aniso_eigenvalue", &aniso_eigenvalue, py::arg("n"), py::arg("eps_aniso"), py::arg("i"), py::arg("j"));
  m.def(
      "gen_extruded3d",
      [](Index nx, Index ny, Index layers, double vert_weight, double neumann_fraction) {
        ExtrudedProblem p = gen_extruded3d(nx, ny, layers, vert_weight, neumann_fraction);
        return py::make_tuple(std::move(p.matrix), std::move(p.columns));
      },
      py::arg("nx"), py::arg("ny"), py::arg("layers"), py::arg("vert_weight") = 1e3,
      py::arg("neumann_fraction") = 0.5, "Returns (matrix, column_map).");

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init([](double eps, const std::string& eps_mode, Index cluster_size, Index stop_size,
                       bool deferred_compression, const std::string& partitioner, double jitter) {
             SolverConfig c;
             c.eps = eps;
             if (eps_mode != "abs" && eps_mode != "rel") throw InvalidArgument("eps_mode must be 'abs' or 'rel'");
             c.eps_mode = eps_mode == "rel" ? TruncationMode::relative : TruncationMode::absolute;
             c.target_cluster_size = cluster_size;
             c.stop_size = stop_size;
             c.deferred_compression = deferred_compression;
             if (partitioner != "general" && partitioner != "extruded") {
               throw InvalidArgument("partitioner must be 'general' or 'extruded'");
             }
             c.partitioner = partitioner == "extruded" ? PartitionerKind::extruded : PartitionerKind::general;
             c.jitter = jitter;
             c.validate();
             return c;
           }),
           py::arg("eps") = 1e-2, py::arg("eps_mode") = "abs", py::arg("cluster_size") = 100,
           py::arg("stop_size") = 500, py::arg("deferred_compression") = true, py::arg("partitioner") = "general",
           py::arg("jitter") = 0.0)
      .def_readwrite("eps", &SolverConfig::eps)
      .def_readwrite("cluster_size", &SolverConfig::target_cluster_size)
      .def_readwrite("stop_size", &SolverConfig::stop_size)
      .def_readwrite("deferred_compression", &SolverConfig::deferred_compression)
      .def_readwrite("jitter", &SolverConfig::jitter);

  py::class_<HierFactorization>(m, "Factorization")
      .def_property_readonly("dimension", [](const HierFactorization& f) { return f.dimension; })
      .def_property_readonly("levels", [](const HierFactorization& f) { return f.levels.size(); })
      .def_property_readonly("top_dimension", &HierFactorization::top_dimension)
      .def_property_readonly("memory_bytes", &HierFactorization::memory_bytes)
      .def_property_readonly("warnings", [](const HierFactorization& f) { return f.warnings; })
      .def_property_readonly("stats",
                             [](const HierFactorization& f) {
                               py::list l;
                               for (const auto& s : f.stats) l.append(level_stats_dict(s));
                               return l;
                             })
      .def("solve", [](const HierFactorization& f, const Vector& b) { return hierarchical_solve(f, b); },
           py::arg("b"), "Apply the approximate inverse.");

  m.def(
      "factor",
      [](const SparseSpdMatrix& A, const SolverConfig& config, const ColumnMap* column_map) {
        py::gil_scoped_release release;
        return hierarchical_factor(A, config, column_map);
      },
      py::arg("matrix"), py::arg("config") = SolverConfig{}, py::arg("column_map") = nullptr);

  m.def(
      "pcg",
      [](const SparseSpdMatrix& A, const Vector& b, const py::object& precond, double tol, Index maxit) {
        return krylov(A, b, precond, "pcg", tol, maxit, 0);
      },
      py::arg("matrix"), py::arg("b"), py::arg("precond") = py::none(), py::arg("tol") = 1e-12,
      py::arg("maxit") = 1000, "Returns (x, report). precond: Factorization, 'ic0', 'none' or None.");
  m.def(
      "gmres",
      [](const SparseSpdMatrix& A, const Vector& b, const py::object& precond, Index restart, double tol,
         Index maxit) { return krylov(A, b, precond, "gmres", tol, maxit, restart); },
      py::arg("matrix"), py::arg("b"), py::arg("precond") = py::none(), py::arg("restart") = 200,
      py::arg("tol") = 1e-12, py::arg("maxit") = 1000);

  m.def(
      "props_suite",
      [](Index trials, std::uint64_t seed) {
        const PropsSummary s = run_props_suite(trials, seed);
        py::dict d;
        d["passed"] = s.passed();
        d["experiments"] = s.experiments;
        d["bound_failures"] = s.bound_failures;
        d["identity_failures"] = s.identity_failures;
        d["psd_failures"] = s.psd_failures;
        d["dominance_failures"] = s.dominance_failures;
        d["max_identity_deviation"] = s.max_identity_deviation;
        return d;
      },
      py::arg("trials") = 200, py::arg("seed") = 42);
  m.def(
      "corollary_suite",
      [](Index trials, std::uint64_t seed) {
        const CorollarySummary s = run_corollary_suite(trials, seed);
        py::dict d;
        d["passed"] = s.passed();
        d["experiments"] = s.experiments;
        d["dc_on_ww_spd"] = s.dc_on_spd;
        d["dc_off_ww_spd"] = s.dc_off_spd;
        return d;
      },
      py::arg("trials") = 200, py::arg("seed") = 42);
  m.def(
      "exactness_suite",
      [](Index trials, std::uint64_t seed) {
        const ExactnessSummary s = run_exactness_suite(trials, seed);
        py::list cases;
        for (const auto& c : s.cases) {
          py::dict d;
          d["name"] = c.name;
          d["n"] = c.n;
          d["levels"] = c.levels;
          d["relative_error"] = c.relative_error;
          d["passed"] = c.passed;
          cases.append(d);
        }
        py::dict d;
        d["passed"] = s.passed();
        d["cases"] = cases;
        return d;
      },
      py::arg("trials") = 5, py::arg("seed") = 42);
  m.def(
      "spd_operator_check",
      [](const HierFactorization& f, Index trials, std::uint64_t seed) {
        const OperatorCheck c = spd_operator_check(f, trials, seed);
        py::dict d;
        d["passed"] = c.passed();
        d["max_symmetry_error"] = c.max_symmetry_error;
        d["min_rayleigh"] = c.min_rayleigh;
        return d;
      },
      py::arg("factorization"), py::arg("trials") = 100, py::arg("seed") = 42);
}
