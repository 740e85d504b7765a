#pragma once

#include <cstdint>
#include <string>

#include "amgf/amg.hpp"
#include "amgf/filtered_preconditioner.hpp"
#include "amgf/linear_operator.hpp"
#include "amgf/sparse_matrix.hpp"

namespace amgf {

/// Dense spectral certificate of the AMGF theory for one operator.
///
/// Spectra are reported for the pencil (M^{-1}, A), i.e. the eigenvalues of
/// (M A)^{-1}: the lower bound reads lmin >= 1 and the upper bound
/// kappa = lmax/lmin <= 2(beta + 2 + omega)/(2 - omega).
struct CertifyReport {
  std::size_t n = 0;
  std::size_t n_c = 0;
  double omega = 0.0;  // lambda_max(B A)
  double alpha = 0.0;  // lower equivalence constant of B^{-1} vs A on V
  double beta = 0.0;   // upper equivalence constant of B^{-1} vs A on V
  double lmin = 0.0;
  double lmax = 0.0;
  double kappa = 0.0;             // kappa(M A)
  double kappa_base = 0.0;        // kappa(B A)
  double bound = 0.0;             // 2(beta + 2 + omega)/(2 - omega)
  double bound_simplified = 0.0;  // 2(beta + 3), valid when omega <= 1
  std::string precision = "double";

  bool lower_bound_holds(double tol = 1e-9) const { return lmin >= 1.0 - tol; }
  bool upper_bound_holds() const { return kappa <= bound * (1.0 + 1e-10); }
  bool simplified_bound_holds() const {
    return omega <= 1.0 + 1e-8 && kappa <= bound_simplified * (1.0 + 1e-10);
  }

  static std::string csv_header();  // n,n_c,omega,beta,lmin,lmax,kappa,bound
  std::string csv_row() const;
};

enum class CertifyPrecision { kDouble, kQuad };

struct CertifyOptions {
  std::size_t dense_threshold = 400;
};

/// Assembles A, B and M densely and computes the certificate. Throws
/// DomainError when n exceeds the dense threshold.
CertifyReport certify_bounds(const SparseMatrix& a, const LinearOperator& m,
                             const LinearOperator& b, const ContactIndexSet& contact,
                             const CertifyOptions& options = {});

/// Certificate of AMGF over the hierarchy `b`, evaluated from the operator
/// definitions rather than from applications: B is rebuilt from the
/// prolongations (exact Galerkin products of A, l1-Gauss-Seidel sweeps,
/// exact coarsest solve) and M from the three-stage formula. Applying B and
/// M in double precision perturbs them by O(eps cond(A)), which dominates
/// the 1e-9 lower-bound check once cond(A) exceeds ~1e6. kQuad forms the
/// Cholesky factor of A, B and L^T B L in 128-bit floating point; the
/// remaining O(1) quantities are handled in double.
CertifyReport certify_amgf(const SparseMatrix& a, const AmgHierarchy& b,
                           const ContactIndexSet& contact, CertifyPrecision precision,
                           const CertifyOptions& options = {});

/// kQuad when double-precision rounding can reach the certificate's
/// tolerances (eps * cond(A) > 1e-10), else kDouble. Dense; honours the
/// threshold like the certificates.
CertifyPrecision certify_precision_for(const SparseMatrix& a, const CertifyOptions& options = {});

struct StabilityCheck {
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// max over samples of lhs / rhs.
  double max_ratio = 0.0;
};

/// Samples random u, splits u = v + P w A-orthogonally and evaluates
///   2 |v|^2_{B^{-1}} + (2 + omega) |P w|^2_A <= 2 (beta + 2 + omega) |u|^2_A.
StabilityCheck check_stability_estimate(const SparseMatrix& a, const LinearOperator& b,
                                        const ContactIndexSet& contact, double omega,
                                        double beta, std::size_t samples, std::uint64_t seed,
                                        const CertifyOptions& options = {});

}  // namespace amgf
