#pragma once

// Cluster partitioners: recursive coordinate / graph bisection and the
// extruded (column-preserving) partitioner for tensor-product meshes.

#include <string>
#include <vector>

#include "hsolve/sparse.hpp"

namespace hsolve {

/// Maps every matrix index to the extruded column (vertical line) it lies on.
struct ColumnMap {
  std::vector<Index> index_to_column;
  Index layers = 0;

  Index column_count() const;
  /// Indices of each column, in increasing order.
  std::vector<std::vector<Index>> columns() const;
};

/// One `index column_id` line per index.
ColumnMap load_column_map(const std::string& path);
void save_column_map(const ColumnMap& map, const std::string& path);

/// Recursive coordinate bisection when A carries coordinates, recursive
/// BFS-level-set bisection of A's graph otherwise. Leaves never exceed
/// `target_cluster_size`.
Partition partition_general(const SparseSpdMatrix& A, Index target_cluster_size);

/// Groups whole columns into clusters; the horizontal grouping is a
/// weighted partition of the column-quotient graph.
Partition partition_extruded(const SparseSpdMatrix& A, const ColumnMap& column_map,
                             Index target_cluster_size);

}  // namespace hsolve
