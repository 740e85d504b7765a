#pragma once

#include <memory>
#include <span>

#include "amgf/linear_operator.hpp"
#include "amgf/sparse_matrix.hpp"

namespace amgf {

enum class SweepDirection { kForward, kBackward };

/// l1 point smoother data: d_i = a_ii + sum_{j != i} |a_ij|. Replacing the
/// diagonal by d_i makes Gauss-Seidel and Jacobi convergent in the energy
/// norm for any SPD matrix, i.e. (Au, u) <= (B_s^{-1} u, u).
class L1Smoother {
 public:
  /// Throws NotSpdError on a nonpositive diagonal entry.
  explicit L1Smoother(std::shared_ptr<const SparseMatrix> a);

  const SparseMatrix& matrix() const { return *a_; }
  const Vector& l1_diagonal() const { return l1_diag_; }

  /// One hybrid l1-Gauss-Seidel sweep in place:
  /// x_i <- x_i + (b_i - sum_j a_ij x_j) / d_i using the latest values.
  void gauss_seidel(std::span<double> x, std::span<const double> b,
                    SweepDirection direction) const;

  /// One l1-Jacobi sweep in place.
  void jacobi(std::span<double> x, std::span<const double> b) const;

 private:
  std::shared_ptr<const SparseMatrix> a_;
  Vector l1_diag_;
};

/// Symmetric smoother B_s as a preconditioner: from x = 0, `sweeps` forward
/// sweeps followed by `sweeps` backward sweeps.
class SymmetricGaussSeidel final : public LinearOperator {
 public:
  SymmetricGaussSeidel(std::shared_ptr<const SparseMatrix> a, int sweeps = 1);
  std::size_t size() const override { return smoother_.matrix().rows(); }
  void apply(std::span<const double> r, std::span<double> z) const override;

 private:
  L1Smoother smoother_;
  int sweeps_;
};

/// Plain diagonal (Jacobi) preconditioner z = diag(A)^{-1} r.
class JacobiPreconditioner final : public LinearOperator {
 public:
  explicit JacobiPreconditioner(const SparseMatrix& a);
  std::size_t size() const override { return inv_diag_.size(); }
  void apply(std::span<const double> r, std::span<double> z) const override;

 private:
  Vector inv_diag_;
};

}  // namespace amgf
