#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsolve {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(std::ptrdiff_t pivot, double value)
      : Error("matrix is not positive definite: pivot " + std::to_string(pivot) +
              " = " + std::to_string(value)),
        pivot_index(pivot),
        pivot_value(value) {}
  std::ptrdiff_t pivot_index;
  double pivot_value;
};

class SingularTriangular : public Error {
 public:
  explicit SingularTriangular(std::ptrdiff_t idx)
      : Error("triangular factor has a zero diagonal at " + std::to_string(idx)), index(idx) {}
  std::ptrdiff_t index;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line_no, const std::string& what)
      : Error("parse error at line " + std::to_string(line_no) + ": " + what), line(line_no) {}
  std::size_t line;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

class NonPositiveDiagonal : public Error {
 public:
  using Error::Error;
};

class PartitionMismatch : public Error {
 public:
  using Error::Error;
};

class ColumnSplitRequired : public Error {
 public:
  ColumnSplitRequired(std::ptrdiff_t column_id, std::ptrdiff_t size, std::ptrdiff_t target)
      : Error("column " + std::to_string(column_id) + " has " + std::to_string(size) +
              " unknowns, more than the target cluster size " + std::to_string(target)),
        column(column_id) {}
  std::ptrdiff_t column;
};

/// Cholesky breakdown of a cluster's diagonal block during elimination.
class DiagonalNotSPD : public Error {
 public:
  DiagonalNotSPD(std::ptrdiff_t level_, std::ptrdiff_t cluster_, std::ptrdiff_t pivot_,
                 double pivot_value_, double eps_)
      : Error("diagonal block of cluster " + std::to_string(cluster_) + " at level " +
              std::to_string(level_) + " is not SPD (pivot " + std::to_string(pivot_) + " = " +
              std::to_string(pivot_value_) + ", eps = " + std::to_string(eps_) + ")"),
        level(level_),
        cluster(cluster_),
        pivot(pivot_),
        pivot_value(pivot_value_),
        eps(eps_) {}
  std::ptrdiff_t level;
  std::ptrdiff_t cluster;
  std::ptrdiff_t pivot;
  double pivot_value;
  double eps;
};

class PreconditionerNotPositive : public Error {
 public:
  PreconditionerNotPositive(std::ptrdiff_t iteration, double rz)
      : Error("preconditioner is not positive: <z,r> = " + std::to_string(rz) + " at iteration " +
              std::to_string(iteration)) {}
};

class BreakdownNonpositivePivot : public Error {
 public:
  BreakdownNonpositivePivot(std::ptrdiff_t row_, double value)
      : Error("incomplete Cholesky breakdown: nonpositive pivot " + std::to_string(value) +
              " at row " + std::to_string(row_)),
        row(row_) {}
  std::ptrdiff_t row;
};

}  // namespace hsolve
