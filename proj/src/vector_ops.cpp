#include "amgf/vector_ops.hpp"

#include <cmath>

#include "amgf/error.hpp"

namespace amgf {

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw SizeError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double norm1(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw SizeError("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

double weighted_norm(std::span<const double> r, const DiagonalMatrix& w, NormKind kind) {
  if (kind == NormKind::kInfinity) return norm_inf(r);
  if (r.size() != w.size()) throw SizeError("weighted_norm: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(w[i] > 0.0)) throw DomainError("weighted_norm: nonpositive weight");
    s += r[i] * r[i] / w[i];
  }
  return std::sqrt(s);
}

}  // namespace amgf
