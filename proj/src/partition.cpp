#include "hsolve/partition.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

namespace hsolve {

namespace {

// Weighted recursive bisection over abstract items. Items are ordered either
// along the widest coordinate axis or by BFS distance from a pseudo-peripheral
// item, then cut where the cumulative weight crosses half the total.
class Bisector {
 public:
  Bisector(const std::vector<Index>& weights, const std::vector<Coord>* coords,
           const std::vector<std::vector<Index>>* adjacency, Index target)
      : weights_(weights),
        coords_(coords),
        adjacency_(adjacency),
        target_(target),
        stamp_(weights.size(), 0) {}

  std::vector<std::vector<Index>> run() {
    std::vector<Index> all(weights_.size());
    std::iota(all.begin(), all.end(), Index{0});
    if (!all.empty()) split(std::move(all));
    return std::move(leaves_);
  }

 private:
  void split(std::vector<Index> items) {
    Index total = 0;
    for (Index i : items) total += weights_[i];
    if (total <= target_ || items.size() == 1) {
      leaves_.push_back(std::move(items));
      return;
    }
    if (coords_) {
      order_by_coordinate(items);
    } else {
      order_by_bfs(items);
    }
    // Cut at the prefix whose weight is closest to total/2.
    const double half = 0.5 * static_cast<double>(total);
    Index acc = 0;
    std::size_t cut = 1;
    for (std::size_t k = 0; k < items.size(); ++k) {
      const Index next = acc + weights_[items[k]];
      if (static_cast<double>(next) >= half) {
        cut = (static_cast<double>(next) - half <= half - static_cast<double>(acc)) ? k + 1 : k;
        break;
      }
      acc = next;
    }
    cut = std::clamp<std::size_t>(cut, 1, items.size() - 1);
    std::vector<Index> right(items.begin() + static_cast<std::ptrdiff_t>(cut), items.end());
    items.resize(cut);
    split(std::move(items));
    split(std::move(right));
  }

  void order_by_coordinate(std::vector<Index>& items) const {
    const auto& c = *coords_;
    Coord lo = c[items[0]], hi = c[items[0]];
    for (Index i : items) {
      for (int d = 0; d < 3; ++d) {
        lo[d] = std::min(lo[d], c[i][d]);
        hi[d] = std::max(hi[d], c[i][d]);
      }
    }
    int axis = 0;
    for (int d = 1; d < 3; ++d) {
      if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
    }
    std::stable_sort(items.begin(), items.end(), [&](Index a, Index b) {
      return c[a][axis] != c[b][axis] ? c[a][axis] < c[b][axis] : a < b;
    });
  }

  // BFS order restricted to `items`; returns the visit order starting at `root`
  // and continuing through remaining components.
  std::vector<Index> bfs(const std::vector<Index>& items, Index root) {
    ++generation_;
    for (Index i : items) stamp_[i] = generation_;
    const std::uint64_t visited = ++generation_;
    std::vector<Index> order;
    order.reserve(items.size());
    auto visit_from = [&](Index start) {
      std::queue<Index> q;
      q.push(start);
      stamp_[start] = visited;
      while (!q.empty()) {
        const Index u = q.front();
        q.pop();
        order.push_back(u);
        for (Index v : (*adjacency_)[u]) {
          if (stamp_[v] == visited - 1) {
            stamp_[v] = visited;
            q.push(v);
          }
        }
      }
    };
    visit_from(root);
    for (Index i : items) {
      if (stamp_[i] != visited) visit_from(i);
    }
    return order;
  }

  void order_by_bfs(std::vector<Index>& items) {
    // Two sweeps to find a pseudo-peripheral starting item.
    auto first = bfs(items, *std::min_element(items.begin(), items.end()));
    items = bfs(items, first.back());
  }

  const std::vector<Index>& weights_;
  const std::vector<Coord>* coords_;
  const std::vector<std::vector<Index>>* adjacency_;
  Index target_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t generation_ = 0;
  std::vector<std::vector<Index>> leaves_;
};

std::vector<std::vector<Index>> graph_of(const SparseSpdMatrix& A) {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(A.n()));
  for (Index i = 0; i < A.n(); ++i) {
    auto cols = A.row_cols(i);
    auto vals = A.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] != i && vals[k] != 0.0) adj[i].push_back(cols[k]);
    }
  }
  return adj;
}

}  // namespace

Index ColumnMap::column_count() const {
  Index m = 0;
  for (Index c : index_to_column) m = std::max(m, c + 1);
  return m;
}

std::vector<std::vector<Index>> ColumnMap::columns() const {
  std::vector<std::vector<Index>> cols(static_cast<std::size_t>(column_count()));
  for (Index i = 0; i < static_cast<Index>(index_to_column.size()); ++i) {
    cols[index_to_column[i]].push_back(i);
  }
  return cols;
}

ColumnMap load_column_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::pair<Index, Index>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%' || line[0] == '#') continue;
    std::istringstream ss(line);
    Index idx, col;
    if (!(ss >> idx >> col)) throw ParseError(line_no, "expected 'index column_id'");
    if (idx < 0 || col < 0) throw ParseError(line_no, "negative index or column");
    pairs.emplace_back(idx, col);
  }
  ColumnMap map;
  map.index_to_column.assign(pairs.size(), -1);
  for (const auto& [idx, col] : pairs) {
    if (idx >= static_cast<Index>(pairs.size()) || map.index_to_column[idx] != -1) {
      throw ParseError(0, "column map indices must be a permutation of 0..n-1");
    }
    map.index_to_column[idx] = col;
  }
  for (const auto& c : map.columns()) map.layers = std::max(map.layers, static_cast<Index>(c.size()));
  return map;
}

void save_column_map(const ColumnMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (std::size_t i = 0; i < map.index_to_column.size(); ++i) {
    out << i << ' ' << map.index_to_column[i] << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

Partition partition_general(const SparseSpdMatrix& A, Index target_cluster_size) {
  if (target_cluster_size < 1) throw InvalidArgument("target cluster size must be >= 1");
  std::vector<Index> weights(static_cast<std::size_t>(A.n()), 1);
  std::vector<std::vector<Index>> clusters;
  if (A.has_coords()) {
    clusters = Bisector(weights, &A.coords(), nullptr, target_cluster_size).run();
  } else {
    const auto adj = graph_of(A);
    clusters = Bisector(weights, nullptr, &adj, target_cluster_size).run();
  }
  return Partition(std::move(clusters), A.n());
}

Partition partition_extruded(const SparseSpdMatrix& A, const ColumnMap& column_map,
                             Index target_cluster_size) {
  if (target_cluster_size < 1) throw InvalidArgument("target cluster size must be >= 1");
  if (static_cast<Index>(column_map.index_to_column.size()) != A.n()) {
    throw PartitionMismatch("column map covers " +
                            std::to_string(column_map.index_to_column.size()) +
                            " indices but the matrix has " + std::to_string(A.n()));
  }
  const auto columns = column_map.columns();
  std::vector<Index> weights(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].empty()) throw PartitionMismatch("column " + std::to_string(c) + " is empty");
    weights[c] = static_cast<Index>(columns[c].size());
    if (weights[c] > target_cluster_size) {
      throw ColumnSplitRequired(static_cast<Index>(c), weights[c], target_cluster_size);
    }
  }

  std::vector<std::vector<Index>> groups;
  if (A.has_coords()) {
    std::vector<Coord> centroids(columns.size(), Coord{0.0, 0.0, 0.0});
    for (std::size_t c = 0; c < columns.size(); ++c) {
      for (Index i : columns[c]) {
        for (int d = 0; d < 2; ++d) centroids[c][d] += A.coords()[i][d];
      }
      for (int d = 0; d < 2; ++d) centroids[c][d] /= static_cast<double>(columns[c].size());
    }
    groups = Bisector(weights, &centroids, nullptr, target_cluster_size).run();
  } else {
    std::vector<std::vector<Index>> adj(columns.size());
    for (Index i = 0; i < A.n(); ++i) {
      const Index ci = column_map.index_to_column[i];
      for (Index j : A.row_cols(i)) {
        const Index cj = column_map.index_to_column[j];
        if (ci != cj) adj[ci].push_back(cj);
      }
    }
    for (auto& nb : adj) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    groups = Bisector(weights, nullptr, &adj, target_cluster_size).run();
  }

  std::vector<std::vector<Index>> clusters;
  clusters.reserve(groups.size());
  for (const auto& g : groups) {
    std::vector<Index> members;
    for (Index c : g) members.insert(members.end(), columns[c].begin(), columns[c].end());
    clusters.push_back(std::move(members));
  }
  return Partition(std::move(clusters), A.n());
}

}  // namespace hsolve
