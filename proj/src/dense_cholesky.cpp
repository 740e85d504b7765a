#include "amgf/dense_cholesky.hpp"

#include <cmath>
#include <string>

#include "amgf/error.hpp"

namespace amgf {

DenseCholesky::DenseCholesky(std::size_t n, std::vector<double> values)
    : n_(n), l_(std::move(values)) {
  if (l_.size() != n_ * n_) throw SizeError("cholesky: expected n*n values");
  factor();
}

DenseCholesky::DenseCholesky(const SparseMatrix& a) : n_(a.rows()) {
  if (a.rows() != a.cols()) throw SizeError("cholesky: matrix not square");
  l_ = to_dense(a);
  factor();
}

void DenseCholesky::factor() {
  const std::size_t n = n_;
  for (std::size_t j = 0; j < n; ++j) {
    double* lj = &l_[j * n];
    double d = lj[j];
    for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
    if (!(d > 0.0) || !std::isfinite(d))
      throw NotSpdError("cholesky: nonpositive pivot " + std::to_string(d) + " at row " +
                        std::to_string(j));
    const double ljj = std::sqrt(d);
    lj[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* li = &l_[i * n];
      double s = li[j];
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) l_[i * n + j] = 0.0;
}

void DenseCholesky::solve_in_place(std::span<double> x) const {
  if (x.size() != n_) throw SizeError("cholesky: rhs size mismatch");
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    const double* li = &l_[i * n];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * x[k];
    x[i] = s / li[i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_[k * n + ii] * x[k];
    x[ii] = s / l_[ii * n + ii];
  }
}

void DenseCholesky::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw SizeError("cholesky: size mismatch");
  std::copy(x.begin(), x.end(), y.begin());
  solve_in_place(y);
}

}  // namespace amgf
