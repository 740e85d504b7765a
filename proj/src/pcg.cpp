#include "amgf/pcg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "amgf/error.hpp"
#include "amgf/vector_ops.hpp"

namespace amgf {

namespace {

// Number of eigenvalues of T strictly less than x.
std::size_t sturm_count(std::span<const double> d, std::span<const double> e, double x) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e2 = i > 0 ? e[i - 1] * e[i - 1] : 0.0;
    q = d[i] - x - (i > 0 ? e2 / q : 0.0);
    if (q == 0.0) q = -std::numeric_limits<double>::epsilon() * (std::abs(x) + 1e-300);
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace

std::pair<double, double> tridiagonal_extreme_eigenvalues(std::span<const double> diag,
                                                          std::span<const double> off) {
  const std::size_t k = diag.size();
  if (k == 0) return {0.0, 0.0};
  if (off.size() + 1 != k) throw SizeError("tridiagonal: off-diagonal length");
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < k; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(off[i - 1]);
    if (i + 1 < k) radius += std::abs(off[i]);
    lo = std::min(lo, diag[i] - radius);
    hi = std::max(hi, diag[i] + radius);
  }
  auto bisect = [&](std::size_t index) {
    // Smallest x with count(x) > index, i.e. eigenvalue number `index`.
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (sturm_count(diag, off, mid) > index)
        b = mid;
      else
        a = mid;
      if (b - a <= 1e-15 * std::max(std::abs(a), std::abs(b))) break;
    }
    return 0.5 * (a + b);
  };
  return {bisect(0), bisect(k - 1)};
}

std::pair<Vector, PcgReport> pcg(const LinearOperator& a, const LinearOperator& m,
                                 std::span<const double> b, double tol, std::size_t max_it) {
  const std::size_t n = a.size();
  if (m.size() != n || b.size() != n) throw SizeError("pcg: size mismatch");
  if (!all_finite(b)) throw DomainError("pcg: right-hand side is not finite");

  PcgReport report;
  report.relative_residuals.push_back(1.0);
  Vector x(n, 0.0), r(b.begin(), b.end()), z(n), p(n), ap(n);
  m.apply(r, z);
  double rz = dot(r, z);
  if (rz < 0.0 || !std::isfinite(rz))
    throw BreakdownError(BreakdownError::Source::kPreconditioner,
                         "pcg: preconditioner is not positive definite, (M b, b) = " +
                             std::to_string(rz));
  if (rz == 0.0) {
    report.converged = true;
    return {std::move(x), std::move(report)};
  }
  const double bnorm = std::sqrt(rz);
  p = z;
  std::vector<double> alphas, betas;
  for (std::size_t k = 0; k < max_it; ++k) {
    a.apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0))
      throw BreakdownError(BreakdownError::Source::kOperator,
                           "pcg: operator is not positive definite, (A p, p) = " +
                               std::to_string(pap) + " at iteration " + std::to_string(k));
    const double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    m.apply(r, z);
    const double rz_new = dot(r, z);
    if (rz_new < 0.0 || !std::isfinite(rz_new))
      throw BreakdownError(BreakdownError::Source::kPreconditioner,
                           "pcg: preconditioner is not positive definite, (M r, r) = " +
                               std::to_string(rz_new) + " at iteration " + std::to_string(k));
    alphas.push_back(alpha);
    ++report.iterations;
    const double rel = std::sqrt(rz_new) / bnorm;
    report.relative_residuals.push_back(rel);
    if (rel <= tol) {
      report.converged = true;
      break;
    }
    const double beta = rz_new / rz;
    betas.push_back(beta);
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rz = rz_new;
  }

  // Lanczos tridiagonal from the CG coefficients.
  const std::size_t k = alphas.size();
  std::vector<double> diag(k), off(k > 0 ? k - 1 : 0);
  for (std::size_t j = 0; j < k; ++j) {
    diag[j] = 1.0 / alphas[j];
    if (j > 0) diag[j] += betas[j - 1] / alphas[j - 1];
    if (j + 1 < k) off[j] = std::sqrt(betas[j]) / alphas[j];
  }
  std::tie(report.ritz_min, report.ritz_max) = tridiagonal_extreme_eigenvalues(diag, off);
  return {std::move(x), std::move(report)};
}

}  // namespace amgf
