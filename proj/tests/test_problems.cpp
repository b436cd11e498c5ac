#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "hsolve/problems.hpp"

using namespace hsolve;
using namespace testutil;

TEST_CASE("aniso2d with n = 1 is the single entry 2 (eps + 1) * 4") {
  for (double eps : {1.0, 1e-4}) {
    const SparseSpdMatrix A = gen_aniso2d(1, eps);
    CHECK(A.n() == 1);
    CHECK(A.at(0, 0) == doctest::Approx(8.0 * (eps + 1.0)).epsilon(1e-15));
  }
  CHECK(gen_aniso2d(1, 1.0).at(0, 0) == 16.0);
}

TEST_CASE("aniso2d n = 2 stencil") {
  const double eps = 0.25;
  const SparseSpdMatrix A = gen_aniso2d(2, eps);
  DenseMatrix expected(4, 4);
  const double d = 2.0 * (eps + 1.0) * 9.0, h = -eps * 9.0, v = -9.0;
  // Index = row * 2 + col; horizontal neighbors share a row.
  expected << d, h, v, 0,
              h, d, 0, v,
              v, 0, d, h,
              0, v, h, d;
  CHECK((A.to_dense() - expected).norm() <= 1e-13);
  CHECK(A.coords()[1][0] == doctest::Approx(2.0 / 3.0));
  CHECK(A.coords()[1][1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("aniso2d is symmetric under x/y exchange when eps = 1") {
  const Index n = 7;
  const SparseSpdMatrix A = gen_aniso2d(n, 1.0);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c)
      for (Index r2 = 0; r2 < n; ++r2)
        for (Index c2 = 0; c2 < n; ++c2)
          CHECK(A.at(r * n + c, r2 * n + c2) == A.at(c * n + r, c2 * n + r2));
}

TEST_CASE("closed-form spectrum matches a dense eigensolver") {
  for (Index n = 1; n <= 12; ++n) {
    for (double eps : {1.0, 1e-2, 1e-4}) {
      const DenseMatrix D = gen_aniso2d(n, eps).to_dense();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D, Eigen::EigenvaluesOnly);
      std::vector<double> closed;
      for (Index i = 1; i <= n; ++i)
        for (Index j = 1; j <= n; ++j) closed.push_back(aniso_eigenvalue(n, eps, i, j));
      std::sort(closed.begin(), closed.end());
      const double scale = es.eigenvalues().maxCoeff();
      for (Index k = 0; k < n * n; ++k) {
        CHECK(std::abs(es.eigenvalues()[k] - closed[k]) <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("smallest eigenvalue approaches eps pi^2 + pi^2") {
  const double eps = 1e-2;
  const double lmin = aniso_eigenvalue(200, eps, 1, 1);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(lmin - (eps + 1.0) * pi2) <= 1e-3 * pi2);
}

TEST_CASE("aniso argument validation") {
  CHECK_THROWS_AS(gen_aniso2d(0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(gen_aniso2d(4, 0.0), InvalidArgument);
  CHECK_THROWS_AS(aniso_eigenvalue(4, 1.0, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(aniso_eigenvalue(4, 1.0, 1, 5), InvalidArgument);
}

TEST_CASE("extruded 1x1x3 column with a Dirichlet bottom") {
  const double w = 1e3;
  const ExtrudedProblem p = gen_extruded3d(1, 1, 3, w, 0.0);
  DenseMatrix expected(3, 3);
  expected << 2 * w, -w, 0,
              -w, 2 * w, -w,
              0, -w, w;
  CHECK((p.matrix.to_dense() - expected).norm() == 0.0);
  CHECK(p.columns.index_to_column == std::vector<Index>{0, 0, 0});
  CHECK(p.columns.layers == 3);
}

TEST_CASE("extruded column map and Neumann strip") {
  const Index nx = 4, ny = 3, L = 5;
  const double w = 100.0;
  const ExtrudedProblem p = gen_extruded3d(nx, ny, L, w, 0.5);
  CHECK(p.matrix.n() == nx * ny * L);
  CHECK(p.columns.column_count() == nx * ny);
  for (const auto& col : p.columns.columns()) CHECK(col.size() == static_cast<std::size_t>(L));
  // Row sums vanish except on Dirichlet-bottom cells, where they equal w.
  const DenseMatrix D = p.matrix.to_dense();
  Index dirichlet = 0;
  for (Index x = 0; x < nx; ++x) {
    for (Index y = 0; y < ny; ++y) {
      const Index c = x + nx * y;
      for (Index z = 0; z < L; ++z) {
        const double rs = D.row(c * L + z).sum();
        const bool expect_dirichlet = z == 0 && x * ny + y >= 6;
        CHECK(std::abs(rs - (expect_dirichlet ? w : 0.0)) <= 1e-10 * w);
        if (expect_dirichlet) ++dirichlet;
      }
    }
  }
  CHECK(dirichlet == 6);
  // SPD by dense Cholesky.
  CHECK(Eigen::LLT<Eigen::MatrixXd>(D).info() == Eigen::Success);
}

TEST_CASE("extruded argument validation") {
  CHECK_THROWS_AS(gen_extruded3d(2, 2, 2, 1e3, 1.0), InvalidArgument);
  CHECK_THROWS_AS(gen_extruded3d(2, 2, 2, 0.5, 0.5), InvalidArgument);
  CHECK_THROWS_AS(gen_extruded3d(2, 2, 2, 1e3, -0.1), InvalidArgument);
  CHECK_THROWS_AS(gen_extruded3d(0, 2, 2, 1e3, 0.5), InvalidArgument);
}
