#pragma once

// Multilevel factorization (partition, eliminate every cluster, recurse on
// the coarse Schur complement) and the matching forward/backward solve.

#include <optional>
#include <string>
#include <vector>

#include "hsolve/elim.hpp"
#include "hsolve/partition.hpp"

namespace hsolve {

enum class PartitionerKind { general, extruded };

struct SolverConfig {
  double eps = 1e-2;
  TruncationMode eps_mode = TruncationMode::absolute;
  Index target_cluster_size = 100;
  Index stop_size = 500;
  bool deferred_compression = true;
  PartitionerKind partitioner = PartitionerKind::general;
  double jitter = 0.0;
  bool check_identity = false;
  Index max_levels = 64;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;
};

struct LevelStats {
  Index level = 0;
  Index dimension = 0;
  Index clusters = 0;
  Index coarse_dimension = 0;
  double mean_cluster_size = 0.0;
  double mean_rank = 0.0;  // mean coarse size over compressed clusters
  Index max_rank = 0;
  Index compressed_clusters = 0;
  double max_identity_residual = -1.0;
  double seconds = 0.0;
};

struct Level {
  Index dimension = 0;
  Partition partition;
  std::vector<EliminationRecord> records;  // elimination order
  std::vector<Index> coarse_offset;        // per cluster, into the next level
  std::vector<Index> coarse_size;
};

struct HierFactorization {
  Index dimension = 0;
  std::vector<Level> levels;
  DenseMatrix top;  // Cholesky factor of the final coarse matrix
  SolverConfig config;
  std::vector<LevelStats> stats;
  std::vector<std::string> warnings;

  std::size_t memory_bytes() const;
  Index top_dimension() const { return top.rows(); }
};

HierFactorization hierarchical_factor(const SparseSpdMatrix& A, const SolverConfig& config,
                                      const ColumnMap* column_map = nullptr);

/// Applies the approximate inverse of A. Read-only on the factorization.
Vector hierarchical_solve(const HierFactorization& fac, const Vector& b);

/// Same map as hierarchical_solve, named for use as a Krylov preconditioner.
Vector preconditioner_apply(const HierFactorization& fac, const Vector& r);

}  // namespace hsolve
