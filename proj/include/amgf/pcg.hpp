#pragma once

#include <span>
#include <utility>
#include <vector>

#include "amgf/linear_operator.hpp"

namespace amgf {

struct PcgReport {
  std::size_t iterations = 0;
  bool converged = false;
  /// sqrt(r_k^T M r_k / b^T M b); entry 0 is 1.
  std::vector<double> relative_residuals;
  /// Extreme eigenvalues of the Lanczos tridiagonal built from the PCG
  /// coefficients; estimates of the extreme eigenvalues of M A.
  double ritz_min = 0.0;
  double ritz_max = 0.0;

  double condition_estimate() const { return ritz_min > 0.0 ? ritz_max / ritz_min : 0.0; }
};

/// Preconditioned conjugate gradients from x0 = 0, stopping on the relative
/// preconditioned residual norm. Throws BreakdownError naming the failing
/// operator when (A p, p) <= 0 or (M r, r) < 0.
std::pair<Vector, PcgReport> pcg(const LinearOperator& a, const LinearOperator& m,
                                 std::span<const double> b, double tol = 1e-10,
                                 std::size_t max_it = 5000);

/// Extreme eigenvalues of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal (Sturm-sequence bisection).
std::pair<double, double> tridiagonal_extreme_eigenvalues(std::span<const double> diag,
                                                          std::span<const double> off);

}  // namespace amgf
