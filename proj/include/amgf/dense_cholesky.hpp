#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "amgf/linear_operator.hpp"
#include "amgf/sparse_matrix.hpp"

namespace amgf {

/// Dense LL^T factorization used for the coarsest multigrid level and the
/// contact block A_w. Throws NotSpdError on a nonpositive pivot.
class DenseCholesky final : public LinearOperator {
 public:
  DenseCholesky() = default;
  /// `values` is an n x n row-major symmetric matrix.
  DenseCholesky(std::size_t n, std::vector<double> values);
  explicit DenseCholesky(const SparseMatrix& a);

  std::size_t size() const override { return n_; }
  /// y = A^{-1} x
  void apply(std::span<const double> x, std::span<double> y) const override;
  /// In-place solve.
  void solve_in_place(std::span<double> x) const;

 private:
  void factor();

  std::size_t n_ = 0;
  std::vector<double> l_;  // lower factor, row-major
};

}  // namespace amgf
