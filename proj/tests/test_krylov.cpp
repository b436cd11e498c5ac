#include "doctest.h"
#include "helpers.hpp"
#include "hsolve/krylov.hpp"
#include "hsolve/problems.hpp"

using namespace hsolve;
using namespace testutil;

TEST_CASE("pcg on the identity converges in one iteration") {
  const SparseSpdMatrix I = SparseSpdMatrix::identity(10);
  Vector b = Vector::LinSpaced(10, 1.0, 10.0);
  const KrylovResult r = pcg(I, b, identity_preconditioner());
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 1);
  CHECK((r.x - b).norm() <= 1e-14 * b.norm());
  CHECK(r.report.residual_history.size() == 2);
  CHECK(r.report.residual_history[0] == 1.0);
}

TEST_CASE("maxit = 0 returns the zero initial guess") {
  const SparseSpdMatrix A = gen_aniso2d(5, 1.0);
  const Vector b = Vector::Ones(A.n());
  const KrylovResult r = pcg(A, b, identity_preconditioner(), 1e-10, 0);
  CHECK(!r.report.converged);
  CHECK(r.report.iterations == 0);
  CHECK(r.x.norm() == 0.0);
  CHECK(r.report.final_relres == 1.0);
  const KrylovResult g = gmres(A, b, identity_preconditioner(), 10, 1e-10, 0);
  CHECK(!g.report.converged);
  CHECK(g.x.norm() == 0.0);
}

TEST_CASE("a zero right-hand side is solved by zero") {
  const SparseSpdMatrix A = gen_aniso2d(4, 1.0);
  const KrylovResult r = pcg(A, Vector::Zero(A.n()), identity_preconditioner());
  CHECK(r.report.converged);
  CHECK(r.x.norm() == 0.0);
}

TEST_CASE("pcg and gmres agree with a dense solve") {
  const SparseSpdMatrix A = gen_aniso2d(12, 0.1);
  std::mt19937_64 rng(1);
  const Vector b = random_vector(rng, A.n());
  const Vector oracle = lu_solve(A.to_dense(), b);
  const KrylovResult p = pcg(A, b, identity_preconditioner(), 1e-12, 2000);
  const KrylovResult g = gmres(A, b, identity_preconditioner(), 200, 1e-12, 2000);
  REQUIRE(p.report.converged);
  REQUIRE(g.report.converged);
  CHECK((p.x - g.x).norm() <= 1e-8 * oracle.norm());
  CHECK((p.x - oracle).norm() <= 1e-8 * oracle.norm());
}

TEST_CASE("reported convergence matches the recomputed residual") {
  const SparseSpdMatrix A = gen_aniso2d(16, 1e-2);
  std::mt19937_64 rng(2);
  const Vector b = random_vector(rng, A.n());
  const IncompleteCholesky ic = IncompleteCholesky::factor(A);
  for (double tol : {1e-6, 1e-10}) {
    const KrylovResult p = pcg(A, b, ic.as_preconditioner(), tol, 1000);
    REQUIRE(p.report.converged);
    CHECK((A.multiply(p.x) - b).norm() / b.norm() <= 1.1 * tol);
    const KrylovResult g = gmres(A, b, ic.as_preconditioner(), 30, tol, 1000);
    REQUIRE(g.report.converged);
    CHECK((A.multiply(g.x) - b).norm() / b.norm() <= 1.1 * tol);
  }
}

TEST_CASE("gmres with restart 1 still converges on a 2x2 SPD system") {
  const SparseSpdMatrix A = SparseSpdMatrix::from_triplets(2, {{0, 0, 4}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}});
  Vector b(2);
  b << 1.0, 2.0;
  const KrylovResult g = gmres(A, b, identity_preconditioner(), 1, 1e-12, 500);
  CHECK(g.report.converged);
  CHECK((A.multiply(g.x) - b).norm() <= 1.1e-12 * b.norm());
  CHECK_THROWS_AS(gmres(A, b, identity_preconditioner(), 0), InvalidArgument);
}

TEST_CASE("IC(0) is exact on diagonal and tridiagonal matrices") {
  std::vector<Triplet> diag, tri;
  const Index n = 30;
  for (Index i = 0; i < n; ++i) {
    diag.push_back({i, i, 1.0 + static_cast<double>(i)});
    tri.push_back({i, i, 2.5});
    if (i > 0) tri.push_back({i, i - 1, -1.0});
    if (i + 1 < n) tri.push_back({i, i + 1, -1.0});
  }
  std::mt19937_64 rng(3);
  const Vector b = random_vector(rng, n);
  for (const auto& t : {diag, tri}) {
    const SparseSpdMatrix A = SparseSpdMatrix::from_triplets(n, t);
    const IncompleteCholesky ic = IncompleteCholesky::factor(A);
    CHECK(ic.shift_used() == 0.0);
    CHECK((ic.apply(b) - lu_solve(A.to_dense(), b)).norm() <= 1e-12 * b.norm());
    const KrylovResult r = pcg(A, b, ic.as_preconditioner());
    CHECK(r.report.iterations == 1);
  }
}

TEST_CASE("IC(0) breakdown and shifted retry") {
  // Signed 4-cycle with eigenvalues 1 +- 0.9 sqrt(2); the third IC(0)
  // pivot is 1 - 0.81 / 0.19 < 0.
  const double a = 0.9;
  std::vector<Triplet> t;
  for (Index i = 0; i < 4; ++i) t.push_back({i, i, 1.0});
  auto add = [&](Index i, Index j, double v) {
    t.push_back({i, j, v});
    t.push_back({j, i, v});
  };
  add(0, 1, a);
  add(1, 2, a);
  add(2, 3, a);
  add(0, 3, -a);
  const SparseSpdMatrix A = SparseSpdMatrix::from_triplets(4, t);
  CHECK_THROWS_AS(IncompleteCholesky::factor(A), BreakdownNonpositivePivot);
  const IncompleteCholesky ic = IncompleteCholesky::factor(A, 1e-2);
  CHECK(ic.shift_used() > 0.0);
}

TEST_CASE("an indefinite preconditioner is reported") {
  const SparseSpdMatrix A = gen_aniso2d(4, 1.0);
  const Preconditioner neg = [](const Vector& r) { return Vector(-r); };
  CHECK_THROWS_AS(pcg(A, Vector::Ones(A.n()), neg), PreconditionerNotPositive);
}

TEST_CASE("solver argument validation") {
  const SparseSpdMatrix A = gen_aniso2d(3, 1.0);
  CHECK_THROWS_AS(pcg(A, Vector::Ones(4), identity_preconditioner()), DimensionError);
  CHECK_THROWS_AS(pcg(A, Vector::Ones(9), identity_preconditioner(), 0.0), InvalidArgument);
  CHECK_THROWS_AS(gmres(A, Vector::Ones(4), identity_preconditioner()), DimensionError);
  const IncompleteCholesky ic = IncompleteCholesky::factor(A);
  CHECK_THROWS_AS(ic.apply(Vector::Ones(2)), DimensionError);
}

TEST_CASE("hierarchical preconditioner accelerates pcg") {
  const SparseSpdMatrix A = gen_aniso2d(32, 1e-3);
  SolverConfig c;
  c.eps = 1e-2;
  c.target_cluster_size = 16;
  c.stop_size = 64;
  const HierFactorization fac = hierarchical_factor(A, c);
  const Vector b = A.multiply(Vector::Ones(A.n()));
  const KrylovResult h = pcg(A, b, make_preconditioner(fac), 1e-10, 1000);
  const KrylovResult n = pcg(A, b, identity_preconditioner(), 1e-10, 1000);
  REQUIRE(h.report.converged);
  CHECK(h.report.iterations < n.report.iterations);
  CHECK((h.x - Vector::Ones(A.n())).norm() <= 1e-6 * std::sqrt(static_cast<double>(A.n())));
}
