#include "hsolve/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace hsolve {

namespace {

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

SparseSpdMatrix SparseSpdMatrix::from_triplets(Index n, std::vector<Triplet> entries,
                                               std::vector<Coord> coords) {
  if (n < 0) throw InvalidArgument("negative matrix dimension");
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw DimensionError("entry (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                           ") outside a " + std::to_string(n) + "x" + std::to_string(n) +
                           " matrix");
    }
    if (!std::isfinite(t.value)) throw InvalidArgument("non-finite matrix entry");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseSpdMatrix A;
  A.n_ = n;
  A.row_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (!A.col_indices_.empty() && k > 0 && entries[k].row == entries[k - 1].row &&
        entries[k].col == entries[k - 1].col) {
      A.values_.back() += entries[k].value;
      continue;
    }
    A.col_indices_.push_back(entries[k].col);
    A.values_.push_back(entries[k].value);
    ++A.row_offsets_[entries[k].row + 1];
  }
  for (Index i = 0; i < n; ++i) A.row_offsets_[i + 1] += A.row_offsets_[i];

  for (Index i = 0; i < n; ++i) {
    bool has_diag = false;
    auto cols = A.row_cols(i);
    auto vals = A.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index j = cols[k];
      if (j == i) {
        has_diag = true;
        if (!(vals[k] > 0.0)) {
          throw NonPositiveDiagonal("diagonal entry " + std::to_string(i) + " is " +
                                    std::to_string(vals[k]));
        }
      } else if (!nearly_equal(vals[k], A.at(j, i))) {
        throw NotSymmetric("A(" + std::to_string(i) + "," + std::to_string(j) +
                           ") != A(" + std::to_string(j) + "," + std::to_string(i) + ")");
      }
    }
    if (!has_diag) {
      throw NonPositiveDiagonal("diagonal entry " + std::to_string(i) + " is missing");
    }
  }
  if (!coords.empty()) A.set_coords(std::move(coords));
  return A;
}

SparseSpdMatrix SparseSpdMatrix::identity(Index n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, std::move(t));
}

void SparseSpdMatrix::set_coords(std::vector<Coord> coords) {
  if (!coords.empty() && static_cast<Index>(coords.size()) != n_) {
    throw DimensionError("coordinate count " + std::to_string(coords.size()) +
                         " does not match dimension " + std::to_string(n_));
  }
  coords_ = std::move(coords);
}

double SparseSpdMatrix::at(Index i, Index j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_offsets_[i] + (it - cols.begin())];
}

void SparseSpdMatrix::multiply(const Vector& x, Vector& y) const {
  if (x.size() != n_) throw DimensionError("multiply: vector size mismatch");
  y.resize(n_);
  for (Index i = 0; i < n_; ++i) {
    double s = 0.0;
    for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      s += values_[k] * x[col_indices_[k]];
    }
    y[i] = s;
  }
}

Vector SparseSpdMatrix::multiply(const Vector& x) const {
  Vector y;
  multiply(x, y);
  return y;
}

DenseMatrix SparseSpdMatrix::to_dense() const {
  DenseMatrix D = DenseMatrix::Zero(n_, n_);
  for (Index i = 0; i < n_; ++i) {
    for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) D(i, col_indices_[k]) = values_[k];
  }
  return D;
}

Partition::Partition(std::vector<std::vector<Index>> clusters, Index n)
    : clusters_(std::move(clusters)), index_to_cluster_(static_cast<std::size_t>(n), -1) {
  for (Index c = 0; c < size(); ++c) {
    auto& members = clusters_[c];
    if (members.empty()) throw PartitionMismatch("cluster " + std::to_string(c) + " is empty");
    std::sort(members.begin(), members.end());
    for (Index i : members) {
      if (i < 0 || i >= n) {
        throw PartitionMismatch("index " + std::to_string(i) + " outside [0, " +
                                std::to_string(n) + ")");
      }
      if (index_to_cluster_[i] != -1) {
        throw PartitionMismatch("index " + std::to_string(i) + " belongs to two clusters");
      }
      index_to_cluster_[i] = c;
    }
  }
  for (Index i = 0; i < n; ++i) {
    if (index_to_cluster_[i] == -1) {
      throw PartitionMismatch("index " + std::to_string(i) + " is not covered");
    }
  }
}

SparseSpdMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  ++line_no;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    throw ParseError(line_no, "expected '%%MatrixMarket matrix coordinate' header");
  }
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer" && field != "double") {
    throw ParseError(line_no, "unsupported field '" + field + "'");
  }
  if (symmetry != "symmetric" && symmetry != "general") {
    throw ParseError(line_no, "unsupported symmetry '" + symmetry + "'");
  }

  Index rows = -1, cols = -1, count = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> count)) throw ParseError(line_no, "bad size line");
    break;
  }
  if (rows < 0) throw ParseError(line_no, "missing size line");
  if (rows != cols) throw ParseError(line_no, "matrix is not square");

  std::map<std::pair<Index, Index>, double> stored;
  Index seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    Index i, j;
    double v;
    if (!(ss >> i >> j >> v)) throw ParseError(line_no, "bad entry");
    if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError(line_no, "index out of range");
    stored[{i - 1, j - 1}] += v;
    ++seen;
  }
  if (seen != count) {
    throw ParseError(line_no, "expected " + std::to_string(count) + " entries, found " +
                                  std::to_string(seen));
  }

  std::vector<Triplet> entries;
  entries.reserve(stored.size() * 2);
  for (const auto& [key, v] : stored) {
    const auto [i, j] = key;
    entries.push_back({i, j, v});
    if (i == j) continue;
    auto mirror = stored.find({j, i});
    if (mirror == stored.end()) {
      if (symmetry == "general") {
        throw NotSymmetric("entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                           ") has no transposed partner");
      }
      entries.push_back({j, i, v});
    } else if (!nearly_equal(mirror->second, v)) {
      throw NotSymmetric("entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                         ") and its transpose differ");
    }
  }
  return SparseSpdMatrix::from_triplets(rows, std::move(entries));
}

void save_matrix_market(const SparseSpdMatrix& A, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot write " + path);
  Index lower_count = 0;
  for (Index i = 0; i < A.n(); ++i) {
    for (Index j : A.row_cols(i)) lower_count += j <= i;
  }
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate real symmetric\n");
  std::fprintf(f, "%td %td %td\n", A.n(), A.n(), lower_count);
  for (Index i = 0; i < A.n(); ++i) {
    auto cols = A.row_cols(i);
    auto vals = A.row_values(i);
    for (std::size_t k = 0; k < cols.size() && cols[k] <= i; ++k) {
      std::fprintf(f, "%td %td %.17g\n", i + 1, cols[k] + 1, vals[k]);
    }
  }
  if (std::fclose(f) != 0) throw IoError("failed writing " + path);
}

std::vector<Coord> load_coords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<Coord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%' || line[0] == '#') continue;
    std::istringstream ss(line);
    Coord c{0.0, 0.0, 0.0};
    if (!(ss >> c[0] >> c[1])) throw ParseError(line_no, "bad coordinate line");
    ss >> c[2];
    out.push_back(c);
  }
  return out;
}

void save_coords(const std::vector<Coord>& coords, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot write " + path);
  for (const auto& c : coords) std::fprintf(f, "%.17g %.17g %.17g\n", c[0], c[1], c[2]);
  if (std::fclose(f) != 0) throw IoError("failed writing " + path);
}

DenseMatrix extract_block(const SparseSpdMatrix& A, std::span<const Index> rows,
                          std::span<const Index> cols) {
  std::unordered_map<Index, Index> col_pos;
  col_pos.reserve(cols.size() * 2);
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] < 0 || cols[k] >= A.n()) {
      throw DimensionError("extract_block: column index " + std::to_string(cols[k]) +
                           " out of range");
    }
    col_pos.emplace(cols[k], static_cast<Index>(k));
  }
  DenseMatrix B = DenseMatrix::Zero(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index i = rows[r];
    if (i < 0 || i >= A.n()) {
      throw DimensionError("extract_block: row index " + std::to_string(i) + " out of range");
    }
    auto rc = A.row_cols(i);
    auto rv = A.row_values(i);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      auto it = col_pos.find(rc[k]);
      if (it != col_pos.end()) B(static_cast<Index>(r), it->second) = rv[k];
    }
  }
  return B;
}

QuotientGraph build_quotient_graph(const SparseSpdMatrix& A, const Partition& partition) {
  if (partition.dimension() != A.n()) {
    throw PartitionMismatch("partition covers " + std::to_string(partition.dimension()) +
                            " indices but the matrix has " + std::to_string(A.n()));
  }
  const auto& owner = partition.index_to_cluster();
  QuotientGraph g;
  g.m = partition.size();
  g.neighbors.resize(static_cast<std::size_t>(g.m));
  for (Index i = 0; i < A.n(); ++i) {
    auto cols = A.row_cols(i);
    auto vals = A.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const Index p = owner[i];
      const Index q = owner[cols[k]];
      if (p != q && vals[k] != 0.0) g.neighbors[p].push_back(q);
    }
  }
  for (auto& nb : g.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

}  // namespace hsolve
