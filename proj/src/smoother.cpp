#include "amgf/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "amgf/error.hpp"

namespace amgf {

L1Smoother::L1Smoother(std::shared_ptr<const SparseMatrix> a) : a_(std::move(a)) {
  if (!a_ || a_->rows() != a_->cols()) throw SizeError("l1 smoother: matrix must be square");
  const std::size_t n = a_->rows();
  l1_diag_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto cols = a_->row_columns(i);
    auto vals = a_->row_values(i);
    double diag = 0.0, off = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] == i)
        diag = vals[k];
      else
        off += std::abs(vals[k]);
    }
    if (!(diag > 0.0))
      throw NotSpdError("l1 smoother: nonpositive diagonal entry at row " + std::to_string(i));
    l1_diag_[i] = diag + off;
  }
}

void L1Smoother::gauss_seidel(std::span<double> x, std::span<const double> b,
                              SweepDirection direction) const {
  const std::size_t n = a_->rows();
  if (x.size() != n || b.size() != n) throw SizeError("l1-gs: size mismatch");
  auto relax = [&](std::size_t i) {
    auto cols = a_->row_columns(i);
    auto vals = a_->row_values(i);
    double r = b[i];
    for (std::size_t k = 0; k < cols.size(); ++k) r -= vals[k] * x[cols[k]];
    x[i] += r / l1_diag_[i];
  };
  if (direction == SweepDirection::kForward) {
    for (std::size_t i = 0; i < n; ++i) relax(i);
  } else {
    for (std::size_t i = n; i-- > 0;) relax(i);
  }
}

void L1Smoother::jacobi(std::span<double> x, std::span<const double> b) const {
  const std::size_t n = a_->rows();
  if (x.size() != n || b.size() != n) throw SizeError("l1-jacobi: size mismatch");
  Vector ax(n);
  a_->multiply(x, ax);
  for (std::size_t i = 0; i < n; ++i) x[i] += (b[i] - ax[i]) / l1_diag_[i];
}

SymmetricGaussSeidel::SymmetricGaussSeidel(std::shared_ptr<const SparseMatrix> a, int sweeps)
    : smoother_(std::move(a)), sweeps_(sweeps) {
  if (sweeps_ < 1) throw DomainError("symmetric gauss-seidel: sweeps must be >= 1");
}

void SymmetricGaussSeidel::apply(std::span<const double> r, std::span<double> z) const {
  std::fill(z.begin(), z.end(), 0.0);
  for (int s = 0; s < sweeps_; ++s) smoother_.gauss_seidel(z, r, SweepDirection::kForward);
  for (int s = 0; s < sweeps_; ++s) smoother_.gauss_seidel(z, r, SweepDirection::kBackward);
}

JacobiPreconditioner::JacobiPreconditioner(const SparseMatrix& a) {
  inv_diag_ = a.diagonal_entries();
  for (std::size_t i = 0; i < inv_diag_.size(); ++i) {
    if (!(inv_diag_[i] > 0.0))
      throw NotSpdError("jacobi: nonpositive diagonal entry at row " + std::to_string(i));
    inv_diag_[i] = 1.0 / inv_diag_[i];
  }
}

void JacobiPreconditioner::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != inv_diag_.size() || z.size() != inv_diag_.size())
    throw SizeError("jacobi: size mismatch");
  for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] * inv_diag_[i];
}

}  // namespace amgf
