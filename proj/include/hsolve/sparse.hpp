#pragma once

// Symmetric sparse storage, MatrixMarket I/O, dense block extraction and the
// cluster quotient graph.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsolve/kernels.hpp"

namespace hsolve {

using Coord = std::array<double, 3>;

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// CSR matrix with both triangles stored. Construction validates symmetry,
/// a strictly positive diagonal and sorted column indices.
class SparseSpdMatrix {
 public:
  SparseSpdMatrix() = default;

  /// Duplicate entries are summed. Entries are taken as given: callers
  /// supply both triangles.
  static SparseSpdMatrix from_triplets(Index n, std::vector<Triplet> entries,
                                       std::vector<Coord> coords = {});

  static SparseSpdMatrix identity(Index n);

  Index n() const { return n_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }
  std::span<const Index> row_offsets() const { return row_offsets_; }
  std::span<const Index> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  std::span<const Index> row_cols(Index i) const {
    return {col_indices_.data() + row_offsets_[i],
            static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i])};
  }
  std::span<const double> row_values(Index i) const {
    return {values_.data() + row_offsets_[i],
            static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i])};
  }

  bool has_coords() const { return !coords_.empty(); }
  const std::vector<Coord>& coords() const { return coords_; }
  void set_coords(std::vector<Coord> coords);

  double at(Index i, Index j) const;
  Vector multiply(const Vector& x) const;
  void multiply(const Vector& x, Vector& y) const;
  DenseMatrix to_dense() const;

  friend bool operator==(const SparseSpdMatrix& a, const SparseSpdMatrix& b) {
    return a.n_ == b.n_ && a.row_offsets_ == b.row_offsets_ &&
           a.col_indices_ == b.col_indices_ && a.values_ == b.values_;
  }

 private:
  Index n_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<double> values_;
  std::vector<Coord> coords_;
};

/// Disjoint clusters covering [0, n), each sorted and nonempty.
class Partition {
 public:
  Partition() = default;
  /// Validates and builds the inverse map. Throws PartitionMismatch.
  Partition(std::vector<std::vector<Index>> clusters, Index n);

  Index size() const { return static_cast<Index>(clusters_.size()); }
  Index dimension() const { return static_cast<Index>(index_to_cluster_.size()); }
  const std::vector<std::vector<Index>>& clusters() const { return clusters_; }
  const std::vector<Index>& cluster(Index c) const { return clusters_[c]; }
  const std::vector<Index>& index_to_cluster() const { return index_to_cluster_; }

 private:
  std::vector<std::vector<Index>> clusters_;
  std::vector<Index> index_to_cluster_;
};

/// Symmetric cluster adjacency; no self loops.
struct QuotientGraph {
  Index m = 0;
  std::vector<std::vector<Index>> neighbors;  // sorted
};

SparseSpdMatrix load_matrix_market(const std::string& path);
void save_matrix_market(const SparseSpdMatrix& A, const std::string& path);

/// One `x y z` line per index.
std::vector<Coord> load_coords(const std::string& path);
void save_coords(const std::vector<Coord>& coords, const std::string& path);

DenseMatrix extract_block(const SparseSpdMatrix& A, std::span<const Index> rows,
                          std::span<const Index> cols);

QuotientGraph build_quotient_graph(const SparseSpdMatrix& A, const Partition& partition);

}  // namespace hsolve
