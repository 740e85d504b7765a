#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "amgf/linear_operator.hpp"

namespace amgf {

/// Diagonal matrix stored by its entries. Used for D = diag(M_s z / s),
/// the lumped masses M_u and M_s, and the bound-constraint blocks.
class DiagonalMatrix {
 public:
  DiagonalMatrix() = default;
  explicit DiagonalMatrix(Vector entries) : entries_(std::move(entries)) {}
  DiagonalMatrix(std::size_t n, double value) : entries_(n, value) {}

  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  double& operator[](std::size_t i) { return entries_[i]; }
  const Vector& entries() const { return entries_; }
  Vector& entries() { return entries_; }

  /// max/min entry ratio; entries must be positive.
  double condition() const;

 private:
  Vector entries_;
};

/// Compressed-row sparse matrix. Finalized instances are immutable.
/// Symmetric matrices are stored with both triangles.
class SparseMatrix final : public LinearOperator {
 public:
  SparseMatrix() = default;

  /// Validates the CSR invariants and throws SizeError on violation.
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, Vector values);

  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(std::span<const double> entries);
  static SparseMatrix zeros(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::size_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  std::span<const std::size_t> row_columns(std::size_t i) const {
    return {col_indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }

  /// Entry lookup by binary search; zero when not stored.
  double at(std::size_t i, std::size_t j) const;

  /// y = A x. Deterministic summation order (row traversal).
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = A^T x.
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  std::size_t size() const override { return rows_; }
  void apply(std::span<const double> x, std::span<double> y) const override {
    multiply(x, y);
  }

  SparseMatrix transpose() const;
  Vector diagonal_entries() const;

  /// |a_ij - a_ji| <= tol * max(1, |a_ij|) for all stored pairs.
  bool is_symmetric(double tol = 1e-12) const;

  /// max_i sum_j |a_ij|.
  double norm_inf() const;

  /// Indices of columns holding at least one stored entry.
  std::vector<std::size_t> nonzero_columns() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  Vector values_;
};

/// Coordinate-format accumulator. Duplicate (row, col) entries are summed
/// when the matrix is finalized.
class TripletAssembler {
 public:
  TripletAssembler(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  void add(std::size_t i, std::size_t j, double value);
  void reserve(std::size_t n) { entries_.reserve(n); }

  /// Builds the CSR matrix. Entries that sum to exactly zero are kept so the
  /// sparsity pattern does not depend on values.
  SparseMatrix finalize() const;

 private:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Entry> entries_;
};

/// y = A x with size checking.
Vector spmv(const SparseMatrix& a, std::span<const double> x);

/// C = A B.
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

/// alpha A + beta B over the union pattern.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0,
                 double beta = 1.0);

/// A + diag(d).
SparseMatrix add_diagonal(const SparseMatrix& a, std::span<const double> d);

/// J^T D J. The result is exactly symmetric and supported on the
/// structurally nonzero columns of J.
SparseMatrix triple_product(const SparseMatrix& j, const DiagonalMatrix& d);

/// P^T A P with the result symmetrized to remove rounding asymmetry.
SparseMatrix galerkin_product(const SparseMatrix& p, const SparseMatrix& a);

/// Principal submatrix A(idx, idx); idx must be strictly increasing.
SparseMatrix principal_submatrix(const SparseMatrix& a, std::span<const std::size_t> idx);

/// Rows/columns selected from A: A(rows, cols), both strictly increasing.
SparseMatrix submatrix(const SparseMatrix& a, std::span<const std::size_t> rows,
                       std::span<const std::size_t> cols);

/// Row-major dense copy; intended for small matrices in tests and diagnostics.
std::vector<double> to_dense(const SparseMatrix& a);

}  // namespace amgf
