#include "hsolve/hfact.hpp"

#include <chrono>
#include <cmath>

namespace hsolve {

namespace {

// Dense fallback is refused above this size.
constexpr Index kMaxDenseFallback = 20000;

DenseMatrix factor_top(const SparseSpdMatrix& A, Index level, double eps) {
  try {
    return cholesky_unchecked(A.to_dense());
  } catch (const NotPositiveDefinite& e) {
    throw DiagonalNotSPD(level, -1, e.pivot_index, e.pivot_value, eps);
  }
}

struct CoarseSystem {
  SparseSpdMatrix matrix;
  std::vector<Index> offset;
  std::vector<Index> size;
};

CoarseSystem extract_coarse(const BlockState& st, const SparseSpdMatrix& fine,
                            const Partition& partition, Index next_level, double eps) {
  const Index m = st.cluster_count();
  CoarseSystem out;
  out.offset.assign(m, 0);
  out.size.assign(m, 0);
  Index n = 0;
  for (Index c = 0; c < m; ++c) {
    out.offset[c] = n;
    out.size[c] = st.dim(c);
    n += st.dim(c);
  }

  std::vector<Triplet> t;
  for (Index p = 0; p < m; ++p) {
    const Index dp = st.dim(p);
    if (dp == 0) continue;
    const DenseMatrix& D = st.diagonal(p);
    for (Index i = 0; i < dp; ++i) {
      if (!(D(i, i) > 0.0)) throw DiagonalNotSPD(next_level, -1, out.offset[p] + i, D(i, i), eps);
      t.push_back({out.offset[p] + i, out.offset[p] + i, D(i, i)});
      for (Index j = 0; j < i; ++j) {
        const double v = 0.5 * (D(i, j) + D(j, i));
        if (v == 0.0) continue;
        t.push_back({out.offset[p] + i, out.offset[p] + j, v});
        t.push_back({out.offset[p] + j, out.offset[p] + i, v});
      }
    }
    for (Index q : st.links(p)) {
      if (q <= p || st.dim(q) == 0) continue;
      const DenseMatrix B = st.block(p, q);
      for (Index i = 0; i < B.rows(); ++i) {
        for (Index j = 0; j < B.cols(); ++j) {
          const double v = B(i, j);
          if (v == 0.0) continue;
          t.push_back({out.offset[p] + i, out.offset[q] + j, v});
          t.push_back({out.offset[q] + j, out.offset[p] + i, v});
        }
      }
    }
  }

  std::vector<Coord> coords;
  if (fine.has_coords()) {
    coords.reserve(static_cast<std::size_t>(n));
    for (Index c = 0; c < m; ++c) {
      Coord centroid{0.0, 0.0, 0.0};
      const auto& members = partition.cluster(c);
      for (Index i : members) {
        for (int d = 0; d < 3; ++d) centroid[d] += fine.coords()[i][d];
      }
      for (int d = 0; d < 3; ++d) centroid[d] /= static_cast<double>(members.size());
      for (Index r = 0; r < st.dim(c); ++r) coords.push_back(centroid);
    }
  }
  out.matrix = SparseSpdMatrix::from_triplets(n, std::move(t), std::move(coords));
  return out;
}

void solve_from(const HierFactorization& fac, std::size_t lvl, Vector& x) {
  if (lvl == fac.levels.size()) {
    if (fac.top.rows() == 0) return;
    const auto G = fac.top.triangularView<Eigen::Lower>();
    G.solveInPlace(x);
    fac.top.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return;
  }
  const Level& L = fac.levels[lvl];
  const Index m = L.partition.size();
  LiveVector live;
  live.clusters.resize(static_cast<std::size_t>(m));
  for (Index c = 0; c < m; ++c) {
    const auto& members = L.partition.cluster(c);
    Vector& xc = live.clusters[c];
    xc.resize(static_cast<Index>(members.size()));
    for (std::size_t k = 0; k < members.size(); ++k) xc[static_cast<Index>(k)] = x[members[k]];
  }

  std::vector<Vector> fine(L.records.size());
  for (std::size_t r = 0; r < L.records.size(); ++r) {
    apply_w(L.records[r], live, fine[r], Direction::forward);
  }

  Index coarse_n = 0;
  for (Index c = 0; c < m; ++c) coarse_n += L.coarse_size[c];
  Vector coarse(coarse_n);
  for (Index c = 0; c < m; ++c) coarse.segment(L.coarse_offset[c], L.coarse_size[c]) = live.clusters[c];
  solve_from(fac, lvl + 1, coarse);
  for (Index c = 0; c < m; ++c) live.clusters[c] = coarse.segment(L.coarse_offset[c], L.coarse_size[c]);

  for (std::size_t r = L.records.size(); r-- > 0;) {
    apply_w(L.records[r], live, fine[r], Direction::backward);
  }
  for (Index c = 0; c < m; ++c) {
    const auto& members = L.partition.cluster(c);
    const Vector& xc = live.clusters[c];
    for (std::size_t k = 0; k < members.size(); ++k) x[members[k]] = xc[static_cast<Index>(k)];
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(eps >= 0.0)) throw InvalidArgument("eps must be nonnegative");
  if (target_cluster_size < 1) throw InvalidArgument("target cluster size must be >= 1");
  if (stop_size < target_cluster_size) {
    throw InvalidArgument("stop size must be at least the target cluster size");
  }
  if (!(jitter >= 0.0)) throw InvalidArgument("jitter must be nonnegative");
  if (max_levels < 1) throw InvalidArgument("max_levels must be >= 1");
}

std::size_t HierFactorization::memory_bytes() const {
  std::size_t doubles = static_cast<std::size_t>(top.size());
  for (const auto& L : levels) {
    for (const auto& r : L.records) doubles += r.stored_doubles();
  }
  return doubles * sizeof(double);
}

HierFactorization hierarchical_factor(const SparseSpdMatrix& A, const SolverConfig& config,
                                      const ColumnMap* column_map) {
  config.validate();
  if (config.partitioner == PartitionerKind::extruded && column_map == nullptr) {
    throw InvalidArgument("the extruded partitioner needs a column map");
  }
  HierFactorization fac;
  fac.dimension = A.n();
  fac.config = config;

  EliminationOptions opts;
  opts.eps = config.eps;
  opts.eps_mode = config.eps_mode;
  opts.deferred_compression = config.deferred_compression;
  opts.jitter = config.jitter;
  opts.check_identity = config.check_identity;

  SparseSpdMatrix coarse_storage;
  const SparseSpdMatrix* current = &A;
  for (Index level = 0;; ++level) {
    if (current->n() <= config.stop_size) {
      fac.top = factor_top(*current, level, config.eps);
      break;
    }
    if (level >= config.max_levels) {
      throw Error("hierarchical_factor: exceeded " + std::to_string(config.max_levels) +
                  " levels without reaching the stop size");
    }
    const auto t0 = std::chrono::steady_clock::now();
    Partition partition = (level == 0 && config.partitioner == PartitionerKind::extruded)
                              ? partition_extruded(*current, *column_map, config.target_cluster_size)
                              : partition_general(*current, config.target_cluster_size);
    BlockState st = BlockState::from_matrix(*current, partition);

    Level L;
    L.dimension = current->n();
    LevelStats stats;
    stats.level = level;
    stats.dimension = current->n();
    stats.clusters = partition.size();
    stats.mean_cluster_size = static_cast<double>(current->n()) / static_cast<double>(partition.size());
    opts.level = level;
    double rank_sum = 0.0;
    L.records.reserve(static_cast<std::size_t>(partition.size()));
    for (Index s = 0; s < partition.size(); ++s) {
      EliminationRecord rec = scaled_lowrank_eliminate(st, s, opts);
      if (rec.compressed) {
        ++stats.compressed_clusters;
        rank_sum += static_cast<double>(rec.coarse_size);
        stats.max_rank = std::max(stats.max_rank, rec.coarse_size);
      }
      stats.max_identity_residual = std::max(stats.max_identity_residual, rec.identity_residual);
      L.records.push_back(std::move(rec));
    }
    stats.mean_rank =
        stats.compressed_clusters > 0 ? rank_sum / static_cast<double>(stats.compressed_clusters) : 0.0;

    CoarseSystem coarse = extract_coarse(st, *current, partition, level + 1, config.eps);
    L.coarse_offset = std::move(coarse.offset);
    L.coarse_size = std::move(coarse.size);
    L.partition = std::move(partition);
    stats.coarse_dimension = coarse.matrix.n();
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    fac.levels.push_back(std::move(L));
    fac.stats.push_back(stats);

    coarse_storage = std::move(coarse.matrix);
    current = &coarse_storage;
    if (current->n() == stats.dimension) {
      // No fine DOF was eliminated: eps is too small for this system to shrink.
      if (current->n() > kMaxDenseFallback) {
        throw Error("hierarchical_factor: level " + std::to_string(level) +
                    " eliminated nothing and the remaining system is too large for dense Cholesky");
      }
      fac.warnings.push_back("level " + std::to_string(level) +
                             " eliminated no DOFs; factoring the remaining " +
                             std::to_string(current->n()) + " unknowns densely");
      fac.top = factor_top(*current, level + 1, config.eps);
      break;
    }
  }
  return fac;
}

Vector hierarchical_solve(const HierFactorization& fac, const Vector& b) {
  if (b.size() != fac.dimension) {
    throw DimensionError("hierarchical_solve: right-hand side has size " + std::to_string(b.size()) +
                         ", expected " + std::to_string(fac.dimension));
  }
  Vector x = b;
  solve_from(fac, 0, x);
  return x;
}

Vector preconditioner_apply(const HierFactorization& fac, const Vector& r) {
  return hierarchical_solve(fac, r);
}

}  // namespace hsolve
