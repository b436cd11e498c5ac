#pragma once

// Scaled low-rank elimination of one cluster.
//
// The live system at a level is a block matrix over clusters. Eliminating
// cluster s applies W_s = P_s G_s E_s S_s:
//   S_s  scales the s rows by the inverse Cholesky factor of A_ss,
//   E_s  rotates them by the orthogonal basis of the compressed
//        well-separated block G_s^{-1} A_sw,
//   G_s  eliminates the fine directions (those carrying only the truncated
//        tail of the well-separated coupling),
//   P_s  leaves the coarse directions in place as the cluster's new live DOFs.
// With deferred compression disabled the unscaled A_sw is compressed instead
// and the fine block is eliminated with its own Cholesky factor.

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "hsolve/kernels.hpp"
#include "hsolve/sparse.hpp"

namespace hsolve {

/// The evolving block-sparse matrix A_i of one level.
///
/// Only the block with p < q is stored for each off-diagonal pair; block(q, p)
/// returns its transpose. `neighbors` is the cluster adjacency at the start of
/// the level; any other live coupling is fill-in and is treated as
/// well-separated.
class BlockState {
 public:
  BlockState() = default;
  static BlockState from_matrix(const SparseSpdMatrix& A, const Partition& partition);
  /// Dense blocks over explicit cluster sizes; used by tests and the verifier.
  static BlockState from_dense(const DenseMatrix& A, const std::vector<Index>& cluster_sizes,
                               const std::vector<std::vector<Index>>& neighbors);

  Index cluster_count() const { return static_cast<Index>(dims_.size()); }
  Index dim(Index c) const { return dims_[c]; }
  Index live_dimension() const;
  bool eliminated(Index c) const { return eliminated_[c] != 0; }
  const std::vector<Index>& neighbors(Index c) const { return neighbors_[c]; }
  /// Clusters currently coupled to c by a stored block.
  const std::set<Index>& links(Index c) const { return links_[c]; }

  const DenseMatrix& diagonal(Index c) const { return diag_[c]; }
  bool has_block(Index p, Index q) const;
  /// dims(p) x dims(q); zero when no block is stored.
  DenseMatrix block(Index p, Index q) const;

  void set_diagonal(Index c, DenseMatrix D) { diag_[c] = std::move(D); }
  /// Stores B as block (p, q) (and implicitly its transpose as (q, p)).
  void set_block(Index p, Index q, const DenseMatrix& B);
  /// Adds B to block (p, q), creating it if absent.
  void add_to_block(Index p, Index q, const DenseMatrix& B);
  void erase_block(Index p, Index q);
  void resize_cluster(Index c, Index new_dim) { dims_[c] = new_dim; }
  void mark_eliminated(Index c) { eliminated_[c] = 1; }

  /// Live system as a dense matrix, clusters in index order, together with
  /// the offset of each cluster in it.
  std::pair<DenseMatrix, std::vector<Index>> to_dense() const;
  /// Largest |B(p,q) - B(q,p)^T| over diagonal blocks (off-diagonal blocks
  /// are symmetric by construction).
  double symmetry_error() const;
  std::size_t stored_block_count() const { return off_.size(); }

 private:
  std::vector<Index> dims_;
  std::vector<char> eliminated_;
  std::vector<DenseMatrix> diag_;
  std::map<std::pair<Index, Index>, DenseMatrix> off_;
  std::vector<std::set<Index>> links_;
  std::vector<std::vector<Index>> neighbors_;
};

struct EliminationOptions {
  double eps = 1e-2;
  TruncationMode eps_mode = TruncationMode::absolute;
  bool deferred_compression = true;
  double jitter = 0.0;
  /// Recompute the ww-block Schur error densely and compare it with
  /// V2 * V2^T (deferred compression only).
  bool check_identity = false;
  Index level = 0;
};

/// Everything needed to apply W_s and W_s^T to a vector.
struct EliminationRecord {
  Index cluster = -1;
  Index size_before = 0;  // live size of the cluster when it was eliminated
  Index coarse_size = 0;  // cols(U_hat1)
  Index fine_size() const { return size_before - coarse_size; }

  bool deferred_compression = true;
  DenseMatrix chol;   // G_s (deferred compression only; empty otherwise)
  DenseMatrix basis;  // U_hat = [U_hat1 | U_hat2], size_before x size_before
  /// Cholesky factor of the rotated fine block; empty means identity.
  DenseMatrix fine_factor;
  /// Fine-to-coarse multiplier inside the cluster; empty means zero.
  DenseMatrix coarse_multiplier;
  std::vector<Index> neighbor_ids;
  std::vector<DenseMatrix> neighbor_multipliers;  // dims(n) x fine_size

  bool compressed = false;  // a nonempty well-separated block existed
  Index well_separated_width = 0;
  double tail_norm = 0.0;
  /// ||E_ww - V2 V2^T||_2 / max(||V2 V2^T||_2, tiny); negative when not checked.
  double identity_residual = -1.0;
  double ww_error_norm = -1.0;

  std::size_t stored_doubles() const;
};

/// Eliminates the fine DOFs of cluster s in place. Throws DiagonalNotSPD.
EliminationRecord scaled_lowrank_eliminate(BlockState& state, Index s,
                                           const EliminationOptions& options);

/// Per-cluster slices of a vector living on the current system of a level.
struct LiveVector {
  std::vector<Vector> clusters;
};

enum class Direction { forward, backward };

/// forward:  applies W_s to x; the eliminated fine entries are written to
///           `fine` and the cluster slice shrinks to its coarse part.
/// backward: applies W_s^T; reads `fine`, restores the cluster slice to its
///           size before elimination.
void apply_w(const EliminationRecord& record, LiveVector& x, Vector& fine, Direction direction);

}  // namespace hsolve
