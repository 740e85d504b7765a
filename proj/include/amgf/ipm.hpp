#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "amgf/amg.hpp"
#include "amgf/linear_operator.hpp"
#include "amgf/sparse_matrix.hpp"

namespace amgf {

/// Box bounds delta_lower <= u[i] - u_star[i] <= delta_upper on a subset of
/// DOFs. All vectors are indexed like `indices`.
struct BoxBounds {
  std::vector<std::size_t> indices;
  Vector lower;
  Vector upper;
  Vector u_star;
};

/// One linearized contact QP:
///   min 1/2 u^T K u - f^T u   s.t.  J (u - u_ref) + g_ref >= 0  [, bounds].
struct ContactProblem {
  std::shared_ptr<const SparseMatrix> k;
  Vector f;
  SparseMatrix j;
  Vector g_ref;
  Vector u_ref;
  DiagonalMatrix m_u;
  DiagonalMatrix m_s;
  std::optional<BoxBounds> bounds;
  /// Near-nullspace for the AMG hierarchy (rigid body modes); optional.
  std::vector<Vector> near_nullspace;
  std::size_t block_size = 1;

  std::size_t n() const { return k ? k->rows() : 0; }
  /// Number of gap constraints (bounds excluded).
  std::size_t m() const { return j.rows(); }
  /// Throws SizeError / DomainError on inconsistent data.
  void validate() const;
  /// J (u - u_ref) + g_ref
  Vector gap(std::span<const double> u) const;
  double energy(std::span<const double> u) const;
};

/// All inequality constraints stacked as c(u) = J~ u + c0 >= 0 with weights:
/// gap rows first, then lower-bound rows (+I), then upper-bound rows (-I).
struct StackedConstraints {
  SparseMatrix j;
  Vector c0;
  DiagonalMatrix weights;  // M_s for gap rows, M_u entries for bound rows
  std::size_t num_gap = 0;

  std::size_t size() const { return c0.size(); }
  Vector evaluate(std::span<const double> u) const;
};

StackedConstraints stack_constraints(const ContactProblem& problem);

struct IPState {
  Vector u;
  Vector s;
  Vector lambda;
  Vector z;
  double mu = 0.1;
};

struct Residuals {
  Vector r_u;
  Vector r_s;
  Vector r_lambda;
  Vector r_z;
};

/// r_u = K u - f + J^T lambda, r_s = -lambda - M_s z, r_lambda = c(u) - s,
/// r_z = z s - mu (mu = state.mu unless overridden).
Residuals residuals(const ContactProblem& problem, const StackedConstraints& c,
                    const IPState& state, std::optional<double> mu = std::nullopt);
Residuals residuals(const ContactProblem& problem, const IPState& state,
                    std::optional<double> mu = std::nullopt);

struct ReducedSystem {
  std::shared_ptr<const SparseMatrix> a;  // K + J^T D J + delta I
  Vector b;
  DiagonalMatrix d;  // M_s z / s over all stacked rows
  Vector b_s;
};

ReducedSystem reduced_system(const ContactProblem& problem, const StackedConstraints& c,
                             const IPState& state, const Residuals& r, double delta_reg);
ReducedSystem reduced_system(const ContactProblem& problem, const IPState& state,
                             double delta_reg);

struct Directions {
  Vector du;
  Vector ds;
  Vector dlambda;
  Vector dz;
};

/// s^ = J u^ + r_lambda, lambda^ = D s^ - b_s, z^ = -S^{-1}(r_z + Z s^).
Directions recover_directions(const StackedConstraints& c, const IPState& state,
                              const Residuals& r, const ReducedSystem& sys, Vector du);

/// Largest steps in (0, 1] keeping s + a s^ >= (1 - tau) s and likewise for z.
std::pair<double, double> fraction_to_boundary(std::span<const double> s,
                                               std::span<const double> ds,
                                               std::span<const double> z,
                                               std::span<const double> dz, double tau);

/// Filter of (theta, phi) pairs; a point is acceptable if for every entry
/// it improves theta or phi. Entries dominated by a new entry are dropped.
class Filter {
 public:
  bool acceptable(double theta, double phi) const;
  void add(double theta, double phi);
  void clear() { entries_.clear(); }
  const std::vector<std::pair<double, double>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<double, double>> entries_;
};

enum class PreconditionerKind { kAmg, kAmgf, kJacobi, kExact };

std::string to_string(PreconditionerKind kind);
/// Throws ConfigError on an unknown name.
PreconditionerKind parse_preconditioner(const std::string& name);

struct IpConfig {
  double tol_ip = 1e-6;
  double tol_pcg = 1e-10;
  std::size_t max_pcg_iters = 5000;
  double mu0 = 0.1;
  double kappa_eps = 10.0;
  double s_max = 100.0;
  double kappa_mu = 0.2;
  double theta_mu = 1.5;
  std::size_t max_ip_iters = 200;
  double s_floor = 1e-4;
  PreconditionerKind preconditioner = PreconditionerKind::kAmgf;
  /// Additional preconditioner run on the same Newton systems for
  /// comparison only; its iteration counts are recorded, its solution unused.
  std::optional<PreconditionerKind> shadow;
  // Inertia-free regularization.
  double delta_min = 1e-8;
  double delta_max = 1e8;
  double curvature_factor = 1e-8;
  // Line search.
  double alpha_min = 1e-12;
  double eta_phi = 1e-4;
  double gamma_theta = 1e-5;
  double gamma_phi = 1e-5;
  /// Start from u_ref instead of 0 (the time stepper enables this).
  bool warm_start = false;
  /// Contact coupling produces aggregates of coincident nodes, so the
  /// hierarchy keeps zero columns instead of failing.
  AmgConfig amg = [] {
    AmgConfig c;
    c.rank_deficiency = AmgConfig::RankDeficiency::kZeroColumns;
    return c;
  }();
};

/// mu_next = max(tol_ip / 11, min(kappa_mu mu, mu^theta_mu)).
double barrier_update(double mu, const IpConfig& config);

struct IterationRecord {
  std::size_t iteration = 0;
  double mu = 0.0;
  double e_opt = 0.0;
  double e_opt_mu = 0.0;
  std::size_t pcg_iterations = 0;
  bool pcg_converged = false;
  double ritz_min = 0.0;
  double ritz_max = 0.0;
  long shadow_pcg_iterations = -1;
  bool shadow_converged = false;
  double alpha_p = 0.0;
  double alpha_d = 0.0;
  double delta_reg = 0.0;
  double cond_d = 1.0;
  std::size_t n_c = 0;
};

enum class SolveStatus {
  kConverged,
  kMaxIterations,
  kLineSearchFailure,
  kRegularizationFailure,
  kLinearSolverFailure,
};

std::string to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::kMaxIterations;
  std::string message;
  std::vector<IterationRecord> iterations;
  IPState state;
  double e_opt = 0.0;
  double complementarity = 0.0;  // ||s o z||_inf
  double min_gap = 0.0;          // min of the linearized gap at the solution
  bool converged() const { return status == SolveStatus::kConverged; }
};

/// Callback invoked for every accepted Newton direction (for diagnostics).
using NewtonObserver = std::function<void(const IPState& state, const Residuals& r,
                                          const ReducedSystem& sys, const Directions& dir)>;

/// Optimality error with IPOPT-style scaling of the dual (s_d) and
/// complementarity (s_c) parts.
double optimality_error(const ContactProblem& problem, const StackedConstraints& c,
                        const IPState& state, const Residuals& r, const IpConfig& config);

/// Filter line-search interior-point method.
std::pair<Vector, SolveReport> ip_solve(const ContactProblem& problem, const IpConfig& config = {},
                                        const NewtonObserver& observer = {});

/// Builds the preconditioner for one reduced system.
std::shared_ptr<const LinearOperator> make_preconditioner(
    PreconditionerKind kind, std::shared_ptr<const SparseMatrix> a, const ContactProblem& problem,
    const StackedConstraints& c, const AmgConfig& amg);

}  // namespace amgf
