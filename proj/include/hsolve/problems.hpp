#pragma once

// Synthetic ill-conditioned SPD model problems.

#include "hsolve/partition.hpp"
#include "hsolve/sparse.hpp"

namespace hsolve {

/// Five-point discretization of eps*u_xx + u_yy on an n x n interior grid
/// with Dirichlet boundary, scaled by (n+1)^2. Index = row * n + col, where
/// col runs along x (the weakly coupled direction).
SparseSpdMatrix gen_aniso2d(Index n, double eps_aniso);

/// Closed-form eigenvalue 4(n+1)^2 [eps sin^2(pi i/(2n+2)) + sin^2(pi j/(2n+2))],
/// 1 <= i, j <= n.
double aniso_eigenvalue(Index n, double eps_aniso, Index i, Index j);

struct ExtrudedProblem {
  SparseSpdMatrix matrix;
  ColumnMap columns;
};

/// Seven-point grid of nx x ny columns with `layers` cells each. Vertical
/// couplings weigh `vert_weight`, horizontal ones 1. Top and lateral faces are
/// Neumann; the first round(f * nx * ny) columns in x-major order have a
/// Neumann bottom, the rest a Dirichlet bottom. Index = column * layers + layer.
ExtrudedProblem gen_extruded3d(Index nx, Index ny, Index layers, double vert_weight,
                               double neumann_fraction);

}  // namespace hsolve
