#include "hsolve/problems.hpp"

#include <cmath>
#include <numbers>

namespace hsolve {

SparseSpdMatrix gen_aniso2d(Index n, double eps_aniso) {
  if (n < 1) throw InvalidArgument("gen_aniso2d: n must be >= 1");
  if (!(eps_aniso > 0.0)) throw InvalidArgument("gen_aniso2d: eps_aniso must be positive");
  const double h2 = static_cast<double>((n + 1) * (n + 1));
  const double diag = 2.0 * (eps_aniso + 1.0) * h2;
  const double horiz = -eps_aniso * h2;
  const double vert = -h2;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(5 * n * n));
  std::vector<Coord> coords;
  coords.reserve(static_cast<std::size_t>(n * n));
  const double h = 1.0 / static_cast<double>(n + 1);
  for (Index row = 0; row < n; ++row) {
    for (Index col = 0; col < n; ++col) {
      const Index i = row * n + col;
      if (row > 0) t.push_back({i, i - n, vert});
      if (col > 0) t.push_back({i, i - 1, horiz});
      t.push_back({i, i, diag});
      if (col + 1 < n) t.push_back({i, i + 1, horiz});
      if (row + 1 < n) t.push_back({i, i + n, vert});
      coords.push_back({static_cast<double>(col + 1) * h, static_cast<double>(row + 1) * h, 0.0});
    }
  }
  return SparseSpdMatrix::from_triplets(n * n, std::move(t), std::move(coords));
}

double aniso_eigenvalue(Index n, double eps_aniso, Index i, Index j) {
  if (n < 1 || i < 1 || i > n || j < 1 || j > n) {
    throw InvalidArgument("aniso_eigenvalue: indices must satisfy 1 <= i, j <= n");
  }
  const double denom = 2.0 * static_cast<double>(n + 1);
  const double si = std::sin(std::numbers::pi * static_cast<double>(i) / denom);
  const double sj = std::sin(std::numbers::pi * static_cast<double>(j) / denom);
  return 4.0 * static_cast<double>((n + 1) * (n + 1)) * (eps_aniso * si * si + sj * sj);
}

ExtrudedProblem gen_extruded3d(Index nx, Index ny, Index layers, double vert_weight,
                               double neumann_fraction) {
  if (nx < 1 || ny < 1 || layers < 1) throw InvalidArgument("gen_extruded3d: sizes must be >= 1");
  if (!(vert_weight >= 1.0)) throw InvalidArgument("gen_extruded3d: vert_weight must be >= 1");
  if (!(neumann_fraction >= 0.0 && neumann_fraction <= 1.0)) {
    throw InvalidArgument("gen_extruded3d: neumann fraction must lie in [0, 1]");
  }
  const Index ncols = nx * ny;
  const auto neumann_cols =
      static_cast<Index>(std::llround(neumann_fraction * static_cast<double>(ncols)));
  if (neumann_cols >= ncols) {
    throw InvalidArgument(
        "gen_extruded3d: every bottom column is Neumann and no other face is Dirichlet; the "
        "matrix would be singular");
  }

  auto column_of = [&](Index x, Index y) { return x + nx * y; };
  // x-major ranking, so the Neumann region is a contiguous strip at small x.
  auto rank_of = [&](Index x, Index y) { return x * ny + y; };

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(7 * ncols * layers));
  std::vector<Coord> coords(static_cast<std::size_t>(ncols * layers));
  ColumnMap colmap;
  colmap.layers = layers;
  colmap.index_to_column.resize(static_cast<std::size_t>(ncols * layers));

  for (Index y = 0; y < ny; ++y) {
    for (Index x = 0; x < nx; ++x) {
      const Index c = column_of(x, y);
      const bool dirichlet_bottom = rank_of(x, y) >= neumann_cols;
      for (Index z = 0; z < layers; ++z) {
        const Index i = c * layers + z;
        colmap.index_to_column[i] = c;
        coords[i] = {static_cast<double>(x), static_cast<double>(y),
                     static_cast<double>(z) / static_cast<double>(layers)};
        double diag = 0.0;
        auto couple = [&](Index j, double w) {
          t.push_back({i, j, -w});
          diag += w;
        };
        if (x > 0) couple(column_of(x - 1, y) * layers + z, 1.0);
        if (x + 1 < nx) couple(column_of(x + 1, y) * layers + z, 1.0);
        if (y > 0) couple(column_of(x, y - 1) * layers + z, 1.0);
        if (y + 1 < ny) couple(column_of(x, y + 1) * layers + z, 1.0);
        if (z > 0) couple(i - 1, vert_weight);
        if (z + 1 < layers) couple(i + 1, vert_weight);
        if (z == 0 && dirichlet_bottom) diag += vert_weight;
        t.push_back({i, i, diag});
      }
    }
  }
  ExtrudedProblem out;
  out.matrix = SparseSpdMatrix::from_triplets(ncols * layers, std::move(t), std::move(coords));
  out.columns = std::move(colmap);
  return out;
}

}  // namespace hsolve
