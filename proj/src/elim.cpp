#include "hsolve/elim.hpp"

#include <algorithm>
#include <cmath>

namespace hsolve {

namespace {

std::pair<Index, Index> key_of(Index p, Index q) { return p < q ? std::pair{p, q} : std::pair{q, p}; }

bool contains(const std::vector<Index>& sorted, Index v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

}  // namespace

BlockState BlockState::from_matrix(const SparseSpdMatrix& A, const Partition& partition) {
  const auto graph = build_quotient_graph(A, partition);
  const Index m = partition.size();
  BlockState st;
  st.dims_.resize(m);
  st.eliminated_.assign(m, 0);
  st.diag_.resize(m);
  st.links_.resize(m);
  st.neighbors_ = graph.neighbors;

  std::vector<Index> local(static_cast<std::size_t>(A.n()));
  for (Index c = 0; c < m; ++c) {
    const auto& members = partition.cluster(c);
    st.dims_[c] = static_cast<Index>(members.size());
    st.diag_[c] = DenseMatrix::Zero(st.dims_[c], st.dims_[c]);
    for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = static_cast<Index>(k);
  }
  const auto& owner = partition.index_to_cluster();
  for (Index p = 0; p < m; ++p) {
    for (Index q : graph.neighbors[p]) {
      if (p < q) {
        st.off_.emplace(std::pair{p, q}, DenseMatrix::Zero(st.dims_[p], st.dims_[q]));
        st.links_[p].insert(q);
        st.links_[q].insert(p);
      }
    }
  }
  for (Index i = 0; i < A.n(); ++i) {
    const Index p = owner[i];
    auto cols = A.row_cols(i);
    auto vals = A.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index q = owner[cols[k]];
      if (p == q) {
        st.diag_[p](local[i], local[cols[k]]) = vals[k];
      } else if (p < q && vals[k] != 0.0) {
        st.off_.at({p, q})(local[i], local[cols[k]]) = vals[k];
      }
    }
  }
  return st;
}

BlockState BlockState::from_dense(const DenseMatrix& A, const std::vector<Index>& cluster_sizes,
                                  const std::vector<std::vector<Index>>& neighbors) {
  const Index m = static_cast<Index>(cluster_sizes.size());
  if (static_cast<Index>(neighbors.size()) != m) {
    throw DimensionError("from_dense: neighbor lists do not match the cluster count");
  }
  std::vector<Index> offset(m + 1, 0);
  for (Index c = 0; c < m; ++c) offset[c + 1] = offset[c] + cluster_sizes[c];
  if (A.rows() != offset[m] || A.cols() != offset[m]) {
    throw DimensionError("from_dense: cluster sizes do not add up to the matrix size");
  }
  BlockState st;
  st.dims_ = cluster_sizes;
  st.eliminated_.assign(m, 0);
  st.diag_.resize(m);
  st.links_.resize(m);
  st.neighbors_ = neighbors;
  for (auto& nb : st.neighbors_) std::sort(nb.begin(), nb.end());
  for (Index p = 0; p < m; ++p) {
    st.diag_[p] = A.block(offset[p], offset[p], st.dims_[p], st.dims_[p]);
    for (Index q = p + 1; q < m; ++q) {
      DenseMatrix B = A.block(offset[p], offset[q], st.dims_[p], st.dims_[q]);
      if (B.size() > 0 && B.cwiseAbs().maxCoeff() > 0.0) st.set_block(p, q, B);
    }
  }
  return st;
}

Index BlockState::live_dimension() const {
  Index total = 0;
  for (Index d : dims_) total += d;
  return total;
}

bool BlockState::has_block(Index p, Index q) const { return off_.count(key_of(p, q)) != 0; }

DenseMatrix BlockState::block(Index p, Index q) const {
  if (p == q) return diag_[p];
  auto it = off_.find(key_of(p, q));
  if (it == off_.end()) return DenseMatrix::Zero(dims_[p], dims_[q]);
  if (p < q) return it->second;
  return it->second.transpose();
}

void BlockState::set_block(Index p, Index q, const DenseMatrix& B) {
  if (p == q) {
    diag_[p] = B;
    return;
  }
  if (p < q) {
    off_[{p, q}] = B;
  } else {
    off_[{q, p}] = B.transpose();
  }
  links_[p].insert(q);
  links_[q].insert(p);
}

void BlockState::add_to_block(Index p, Index q, const DenseMatrix& B) {
  if (p == q) {
    diag_[p] += B;
    return;
  }
  auto [it, inserted] = off_.try_emplace(key_of(p, q));
  if (inserted) {
    it->second = p < q ? B : DenseMatrix(B.transpose());
    links_[p].insert(q);
    links_[q].insert(p);
  } else if (p < q) {
    it->second += B;
  } else {
    it->second += B.transpose();
  }
}

void BlockState::erase_block(Index p, Index q) {
  off_.erase(key_of(p, q));
  links_[p].erase(q);
  links_[q].erase(p);
}

std::pair<DenseMatrix, std::vector<Index>> BlockState::to_dense() const {
  const Index m = cluster_count();
  std::vector<Index> offset(m + 1, 0);
  for (Index c = 0; c < m; ++c) offset[c + 1] = offset[c] + dims_[c];
  DenseMatrix D = DenseMatrix::Zero(offset[m], offset[m]);
  for (Index c = 0; c < m; ++c) D.block(offset[c], offset[c], dims_[c], dims_[c]) = diag_[c];
  for (const auto& [key, B] : off_) {
    const auto [p, q] = key;
    D.block(offset[p], offset[q], dims_[p], dims_[q]) = B;
    D.block(offset[q], offset[p], dims_[q], dims_[p]) = B.transpose();
  }
  return {D, offset};
}

double BlockState::symmetry_error() const {
  double err = 0.0;
  for (const auto& D : diag_) {
    if (D.size() > 0) err = std::max(err, (D - D.transpose()).cwiseAbs().maxCoeff());
  }
  return err;
}

std::size_t EliminationRecord::stored_doubles() const {
  std::size_t total = static_cast<std::size_t>(chol.size() + basis.size() + fine_factor.size() +
                                               coarse_multiplier.size());
  for (const auto& L : neighbor_multipliers) total += static_cast<std::size_t>(L.size());
  return total;
}

EliminationRecord scaled_lowrank_eliminate(BlockState& state, Index s,
                                           const EliminationOptions& options) {
  if (s < 0 || s >= state.cluster_count()) throw InvalidArgument("cluster index out of range");
  if (state.eliminated(s)) {
    throw InvalidArgument("cluster " + std::to_string(s) + " was already eliminated");
  }
  EliminationRecord rec;
  rec.cluster = s;
  rec.deferred_compression = options.deferred_compression;
  const Index d = state.dim(s);
  rec.size_before = d;
  if (d == 0) {
    state.mark_eliminated(s);
    return rec;
  }

  std::vector<Index> nbrs;
  std::vector<Index> far;
  for (Index q : state.links(s)) {
    if (state.dim(q) == 0) continue;
    (contains(state.neighbors(s), q) ? nbrs : far).push_back(q);
  }

  DenseMatrix Ass = state.diagonal(s);
  if (options.jitter > 0.0) Ass.diagonal().array() += options.jitter;

  DenseMatrix G;
  try {
    G = cholesky_unchecked(Ass);
  } catch (const NotPositiveDefinite& e) {
    throw DiagonalNotSPD(options.level, s, e.pivot_index, e.pivot_value, options.eps);
  }

  Index far_width = 0;
  for (Index q : far) far_width += state.dim(q);
  DenseMatrix Asw(d, far_width);
  {
    Index col = 0;
    for (Index q : far) {
      Asw.middleCols(col, state.dim(q)) = state.block(s, q);
      col += state.dim(q);
    }
  }
  rec.compressed = !far.empty();
  rec.well_separated_width = far_width;

  const bool dc = options.deferred_compression;
  // The block that gets compressed: G^{-1} A_sw with deferred compression,
  // A_sw itself without.
  DenseMatrix M = dc ? tri_solve(G, Asw, TriSolveMode::left_forward) : Asw;
  TruncatedFactor tf = truncated_lowrank(M, options.eps, options.eps_mode);
  const Index k = tf.rank;
  const Index f = d - k;
  rec.coarse_size = k;
  rec.tail_norm = tf.tail_norm;
  const DenseMatrix& U = tf.basis;
  const auto U1 = U.leftCols(k);

  // Rotated coupling of s to each neighbor: rows [coarse; fine].
  std::vector<DenseMatrix> rotated(nbrs.size());
  for (std::size_t a = 0; a < nbrs.size(); ++a) {
    DenseMatrix Asn = state.block(s, nbrs[a]);
    if (dc) Asn = tri_solve(G, Asn, TriSolveMode::left_forward);
    rotated[a] = U.transpose() * Asn;
  }

  DenseMatrix new_diag;
  DenseMatrix Lc;
  if (dc) {
    new_diag = DenseMatrix::Identity(k, k);
  } else {
    const DenseMatrix B = U.transpose() * Ass * U;
    if (f > 0) {
      DenseMatrix Bff = B.bottomRightCorner(f, f);
      Bff = 0.5 * (Bff + Bff.transpose());
      try {
        rec.fine_factor = cholesky_unchecked(Bff);
      } catch (const NotPositiveDefinite& e) {
        throw DiagonalNotSPD(options.level, s, k + e.pivot_index, e.pivot_value, options.eps);
      }
      if (k > 0) {
        Lc = tri_solve(rec.fine_factor, B.topRightCorner(k, f), TriSolveMode::right_forward);
        rec.coarse_multiplier = Lc;
      }
    }
    new_diag = B.topLeftCorner(k, k);
    if (Lc.size() > 0) new_diag -= Lc * Lc.transpose();
    new_diag = 0.5 * (new_diag + new_diag.transpose());
  }

  // Neighbor multipliers L_n (dims(n) x f).
  rec.neighbor_ids = nbrs;
  rec.neighbor_multipliers.resize(nbrs.size());
  for (std::size_t a = 0; a < nbrs.size(); ++a) {
    DenseMatrix C = rotated[a].bottomRows(f);
    if (!dc && f > 0) C = tri_solve(rec.fine_factor, C, TriSolveMode::left_forward);
    rec.neighbor_multipliers[a] = C.transpose();
  }

  if (options.check_identity && dc && rec.compressed) {
    const DenseMatrix V = M.transpose() * U;  // [V1 | V2]
    const DenseMatrix exact = M.transpose() * M;
    const DenseMatrix approx = V.leftCols(k) * V.leftCols(k).transpose();
    const DenseMatrix err = exact - approx;
    const DenseMatrix v2 = V.rightCols(f) * V.rightCols(f).transpose();
    const double ref = norm2(v2);
    rec.ww_error_norm = norm2(err);
    rec.identity_residual = norm2(err - v2) / std::max(ref, 1e-300);
  }

  // Schur update of the neighbor-neighbor blocks; creates fill-in.
  if (f > 0) {
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      const DenseMatrix& La = rec.neighbor_multipliers[a];
      DenseMatrix Daa = state.diagonal(nbrs[a]);
      Daa.noalias() -= La * La.transpose();
      state.set_diagonal(nbrs[a], std::move(Daa));
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
        const DenseMatrix& Lb = rec.neighbor_multipliers[b];
        state.add_to_block(nbrs[a], nbrs[b], -(La * Lb.transpose()));
      }
    }
  }

  // Surviving coarse DOFs of s and their couplings.
  if (k > 0) {
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      DenseMatrix K = rotated[a].topRows(k);
      if (Lc.size() > 0) K -= Lc * rec.neighbor_multipliers[a].transpose();
      state.set_block(s, nbrs[a], K);
    }
    Index col = 0;
    for (Index q : far) {
      state.set_block(s, q, U1.transpose() * M.middleCols(col, state.dim(q)));
      col += state.dim(q);
    }
  } else {
    for (Index q : nbrs) state.erase_block(s, q);
    for (Index q : far) state.erase_block(s, q);
  }
  state.set_diagonal(s, std::move(new_diag));
  state.resize_cluster(s, k);
  state.mark_eliminated(s);

  if (dc) rec.chol = std::move(G);
  rec.basis = U;
  return rec;
}

void apply_w(const EliminationRecord& rec, LiveVector& x, Vector& fine, Direction direction) {
  const Index s = rec.cluster;
  if (s < 0 || s >= static_cast<Index>(x.clusters.size())) {
    throw DimensionError("apply_w: cluster outside the live vector");
  }
  const Index k = rec.coarse_size;
  const Index f = rec.fine_size();
  Vector& xs = x.clusters[s];

  if (direction == Direction::forward) {
    if (xs.size() != rec.size_before) throw DimensionError("apply_w: cluster slice has wrong size");
    Vector t = xs;
    if (rec.chol.size() > 0) rec.chol.triangularView<Eigen::Lower>().solveInPlace(t);
    Vector r = rec.basis.transpose() * t;
    fine = r.tail(f);
    if (rec.fine_factor.size() > 0) rec.fine_factor.triangularView<Eigen::Lower>().solveInPlace(fine);
    xs = r.head(k);
    if (rec.coarse_multiplier.size() > 0) xs.noalias() -= rec.coarse_multiplier * fine;
    for (std::size_t a = 0; a < rec.neighbor_ids.size(); ++a) {
      Vector& xn = x.clusters[rec.neighbor_ids[a]];
      if (xn.size() != rec.neighbor_multipliers[a].rows()) {
        throw DimensionError("apply_w: neighbor slice has wrong size");
      }
      xn.noalias() -= rec.neighbor_multipliers[a] * fine;
    }
    return;
  }

  if (xs.size() != k || fine.size() != f) throw DimensionError("apply_w: slice has wrong size");
  Vector xf = fine;
  for (std::size_t a = 0; a < rec.neighbor_ids.size(); ++a) {
    const Vector& xn = x.clusters[rec.neighbor_ids[a]];
    if (xn.size() != rec.neighbor_multipliers[a].rows()) {
      throw DimensionError("apply_w: neighbor slice has wrong size");
    }
    xf.noalias() -= rec.neighbor_multipliers[a].transpose() * xn;
  }
  if (rec.coarse_multiplier.size() > 0) xf.noalias() -= rec.coarse_multiplier.transpose() * xs;
  if (rec.fine_factor.size() > 0) {
    rec.fine_factor.transpose().triangularView<Eigen::Upper>().solveInPlace(xf);
  }
  Vector r(rec.size_before);
  r << xs, xf;
  Vector t = rec.basis * r;
  if (rec.chol.size() > 0) rec.chol.transpose().triangularView<Eigen::Upper>().solveInPlace(t);
  xs = std::move(t);
}

}  // namespace hsolve
