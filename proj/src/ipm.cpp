#include "amgf/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amgf/dense_cholesky.hpp"
#include "amgf/error.hpp"
#include "amgf/filtered_preconditioner.hpp"
#include "amgf/pcg.hpp"
#include "amgf/smoother.hpp"
#include "amgf/vector_ops.hpp"

namespace amgf {

void ContactProblem::validate() const {
  if (!k || k->rows() != k->cols()) throw SizeError("problem: K must be square");
  const std::size_t nn = n();
  if (f.size() != nn || u_ref.size() != nn || m_u.size() != nn)
    throw SizeError("problem: f, u_ref and M_u must have n entries");
  if (j.rows() > 0 && j.cols() != nn) throw SizeError("problem: J must have n columns");
  if (g_ref.size() != m() || m_s.size() != m())
    throw SizeError("problem: g_ref and M_s must have one entry per constraint");
  for (double v : m_u.entries())
    if (!(v > 0.0)) throw DomainError("problem: M_u must be positive");
  for (double v : m_s.entries())
    if (!(v > 0.0)) throw DomainError("problem: M_s must be positive");
  if (!all_finite(f) || !all_finite(g_ref) || !all_finite(u_ref))
    throw DomainError("problem: non-finite data");
  if (bounds) {
    const auto& b = *bounds;
    const std::size_t nb = b.indices.size();
    if (b.lower.size() != nb || b.upper.size() != nb || b.u_star.size() != nb)
      throw SizeError("problem: bound vectors must match the index list");
    for (std::size_t i = 0; i < nb; ++i) {
      if (b.indices[i] >= nn) throw SizeError("problem: bound index out of range");
      if (i > 0 && b.indices[i] <= b.indices[i - 1])
        throw DomainError("problem: bound indices must be strictly increasing");
      if (!(b.lower[i] < b.upper[i])) throw DomainError("problem: empty bound interval");
    }
  }
  for (const auto& v : near_nullspace)
    if (v.size() != nn) throw SizeError("problem: near-nullspace vector size");
}

Vector ContactProblem::gap(std::span<const double> u) const {
  Vector du(u.begin(), u.end());
  for (std::size_t i = 0; i < du.size(); ++i) du[i] -= u_ref[i];
  Vector g(m());
  j.multiply(du, g);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += g_ref[i];
  return g;
}

double ContactProblem::energy(std::span<const double> u) const {
  Vector ku(n());
  k->multiply(u, ku);
  return 0.5 * dot(u, ku) - dot(f, u);
}

Vector StackedConstraints::evaluate(std::span<const double> u) const {
  Vector c(size());
  j.multiply(u, c);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += c0[i];
  return c;
}

StackedConstraints stack_constraints(const ContactProblem& p) {
  p.validate();
  const std::size_t n = p.n();
  const std::size_t m = p.m();
  const std::size_t nb = p.bounds ? p.bounds->indices.size() : 0;
  StackedConstraints c;
  c.num_gap = m;
  TripletAssembler t(m + 2 * nb, n);
  t.reserve(p.j.nnz() + 2 * nb);
  for (std::size_t i = 0; i < m; ++i) {
    auto cols = p.j.row_columns(i);
    auto vals = p.j.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) t.add(i, cols[k], vals[k]);
  }
  c.c0.resize(m + 2 * nb);
  // g_ref - J u_ref
  Vector ju(m);
  p.j.multiply(p.u_ref, ju);
  for (std::size_t i = 0; i < m; ++i) c.c0[i] = p.g_ref[i] - ju[i];
  Vector w(p.m_s.entries());
  w.resize(m + 2 * nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t idx = p.bounds->indices[b];
    // (u - u*) - lower >= 0
    t.add(m + b, idx, 1.0);
    c.c0[m + b] = -p.bounds->u_star[b] - p.bounds->lower[b];
    // upper - (u - u*) >= 0
    t.add(m + nb + b, idx, -1.0);
    c.c0[m + nb + b] = p.bounds->upper[b] + p.bounds->u_star[b];
    w[m + b] = w[m + nb + b] = p.m_u[idx];
  }
  c.j = t.finalize();
  c.weights = DiagonalMatrix(std::move(w));
  return c;
}

Residuals residuals(const ContactProblem& p, const StackedConstraints& c, const IPState& st,
                    std::optional<double> mu) {
  const std::size_t n = p.n();
  const std::size_t m = c.size();
  if (st.u.size() != n || st.s.size() != m || st.lambda.size() != m || st.z.size() != m)
    throw SizeError("residuals: state size mismatch");
  const double barrier = mu.value_or(st.mu);
  Residuals r;
  r.r_u.resize(n);
  p.k->multiply(st.u, r.r_u);
  Vector jtl(n);
  c.j.multiply_transpose(st.lambda, jtl);
  for (std::size_t i = 0; i < n; ++i) r.r_u[i] += jtl[i] - p.f[i];
  r.r_s.resize(m);
  r.r_z.resize(m);
  r.r_lambda = c.evaluate(st.u);
  for (std::size_t i = 0; i < m; ++i) {
    r.r_s[i] = -st.lambda[i] - c.weights[i] * st.z[i];
    r.r_lambda[i] -= st.s[i];
    r.r_z[i] = st.z[i] * st.s[i] - barrier;
  }
  return r;
}

Residuals residuals(const ContactProblem& p, const IPState& st, std::optional<double> mu) {
  return residuals(p, stack_constraints(p), st, mu);
}

ReducedSystem reduced_system(const ContactProblem& p, const StackedConstraints& c,
                             const IPState& st, const Residuals& r, double delta_reg) {
  const std::size_t n = p.n();
  const std::size_t m = c.size();
  ReducedSystem sys;
  Vector d(m);
  sys.b_s.resize(m);
  Vector rhs_c(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(st.s[i] > 0.0) || !(st.z[i] > 0.0))
      throw DomainError("reduced_system: iterate is not interior");
    d[i] = c.weights[i] * st.z[i] / st.s[i];
    sys.b_s[i] = -(r.r_s[i] + c.weights[i] * r.r_z[i] / st.s[i]);
    // D b_lambda + b_s with b_lambda = -r_lambda
    rhs_c[i] = -d[i] * r.r_lambda[i] + sys.b_s[i];
  }
  sys.d = DiagonalMatrix(std::move(d));
  SparseMatrix a = add(*p.k, triple_product(c.j, sys.d));
  a = add_diagonal(a, Vector(n, delta_reg));
  sys.a = std::make_shared<const SparseMatrix>(std::move(a));
  sys.b.resize(n);
  c.j.multiply_transpose(rhs_c, sys.b);
  for (std::size_t i = 0; i < n; ++i) sys.b[i] -= r.r_u[i];
  return sys;
}

ReducedSystem reduced_system(const ContactProblem& p, const IPState& st, double delta_reg) {
  const auto c = stack_constraints(p);
  return reduced_system(p, c, st, residuals(p, c, st), delta_reg);
}

Directions recover_directions(const StackedConstraints& c, const IPState& st, const Residuals& r,
                              const ReducedSystem& sys, Vector du) {
  const std::size_t m = c.size();
  Directions dir;
  dir.ds.resize(m);
  c.j.multiply(du, dir.ds);
  dir.dlambda.resize(m);
  dir.dz.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    dir.ds[i] += r.r_lambda[i];
    dir.dlambda[i] = sys.d[i] * dir.ds[i] - sys.b_s[i];
    dir.dz[i] = -(r.r_z[i] + st.z[i] * dir.ds[i]) / st.s[i];
  }
  dir.du = std::move(du);
  return dir;
}

std::pair<double, double> fraction_to_boundary(std::span<const double> s,
                                               std::span<const double> ds,
                                               std::span<const double> z,
                                               std::span<const double> dz, double tau) {
  auto rule = [tau](std::span<const double> x, std::span<const double> dx) {
    double alpha = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (dx[i] < 0.0) alpha = std::min(alpha, -tau * x[i] / dx[i]);
    return alpha;
  };
  if (s.size() != ds.size() || z.size() != dz.size())
    throw SizeError("fraction_to_boundary: size mismatch");
  return {rule(s, ds), rule(z, dz)};
}

bool Filter::acceptable(double theta, double phi) const {
  for (const auto& [ft, fp] : entries_)
    if (theta >= ft && phi >= fp) return false;
  return true;
}

void Filter::add(double theta, double phi) {
  std::erase_if(entries_, [&](const auto& e) { return e.first >= theta && e.second >= phi; });
  entries_.push_back({theta, phi});
}

std::string to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::kAmg: return "amg";
    case PreconditionerKind::kAmgf: return "amgf";
    case PreconditionerKind::kJacobi: return "jacobi";
    case PreconditionerKind::kExact: return "exact";
  }
  return "unknown";
}

PreconditionerKind parse_preconditioner(const std::string& name) {
  if (name == "amg") return PreconditionerKind::kAmg;
  if (name == "amgf") return PreconditionerKind::kAmgf;
  if (name == "jacobi") return PreconditionerKind::kJacobi;
  if (name == "exact") return PreconditionerKind::kExact;
  throw ConfigError("unknown preconditioner '" + name + "' (expected amg|amgf|jacobi|exact)");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kLineSearchFailure: return "line_search_failure";
    case SolveStatus::kRegularizationFailure: return "regularization_failure";
    case SolveStatus::kLinearSolverFailure: return "linear_solver_failure";
  }
  return "unknown";
}

double barrier_update(double mu, const IpConfig& config) {
  return std::max(config.tol_ip / 11.0,
                  std::min(config.kappa_mu * mu, std::pow(mu, config.theta_mu)));
}

double optimality_error(const ContactProblem& p, const StackedConstraints& c, const IPState& st,
                        const Residuals& r, const IpConfig& config) {
  const std::size_t m = c.size();
  double sd = 1.0, sc = 1.0;
  if (m > 0) {
    const double md = static_cast<double>(m);
    sd = std::max(config.s_max, (norm1(st.lambda) + norm1(st.z)) / md) / config.s_max;
    sc = std::max(config.s_max, norm1(st.z) / md) / config.s_max;
  }
  double e = weighted_norm(r.r_u, p.m_u) / sd;
  if (m > 0) {
    e = std::max(e, weighted_norm(r.r_s, c.weights) / sd);
    e = std::max(e, norm_inf(r.r_lambda));
    e = std::max(e, norm_inf(r.r_z) / sc);
  }
  return e;
}

std::shared_ptr<const LinearOperator> make_preconditioner(
    PreconditionerKind kind, std::shared_ptr<const SparseMatrix> a, const ContactProblem& p,
    const StackedConstraints& c, const AmgConfig& amg) {
  switch (kind) {
    case PreconditionerKind::kJacobi:
      return std::make_shared<JacobiPreconditioner>(*a);
    case PreconditionerKind::kExact:
      if (a->rows() > 6000) throw ConfigError("exact preconditioner limited to n <= 6000");
      return std::make_shared<DenseCholesky>(*a);
    case PreconditionerKind::kAmg:
    case PreconditionerKind::kAmgf: {
      AmgConfig cfg = amg;
      cfg.block_size = p.block_size;
      auto b = AmgHierarchy::setup(a, p.near_nullspace, cfg);
      if (kind == PreconditionerKind::kAmg) return b;
      std::vector<std::size_t> bound_idx;
      if (p.bounds) bound_idx = p.bounds->indices;
      return std::make_shared<FilteredPreconditioner>(a, b, detect_contact_dofs(c.j, bound_idx));
    }
  }
  throw ConfigError("unknown preconditioner kind");
}

namespace {

double norm2_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double barrier_objective(const ContactProblem& p, const StackedConstraints& c,
                         std::span<const double> u, std::span<const double> s, double mu) {
  double phi = p.energy(u);
  for (std::size_t i = 0; i < s.size(); ++i) phi -= mu * c.weights[i] * std::log(s[i]);
  return phi;
}

}  // namespace

std::pair<Vector, SolveReport> ip_solve(const ContactProblem& p, const IpConfig& cfg,
                                        const NewtonObserver& observer) {
  const StackedConstraints c = stack_constraints(p);
  const std::size_t n = p.n();
  const std::size_t m = c.size();
  const double k_scale = std::max(p.k->norm_inf(), std::numeric_limits<double>::min());
  const double eps = std::numeric_limits<double>::epsilon();

  SolveReport rep;
  IPState& st = rep.state;
  st.mu = cfg.mu0;
  st.u = cfg.warm_start ? p.u_ref : Vector(n, 0.0);
  if (p.bounds) {
    // Move the start strictly inside the box.
    const auto& b = *p.bounds;
    for (std::size_t i = 0; i < b.indices.size(); ++i) {
      const double lo = b.u_star[i] + b.lower[i], hi = b.u_star[i] + b.upper[i];
      const double push = std::min(1e-2 * std::max(1.0, std::abs(st.u[b.indices[i]])),
                                   0.5 * (hi - lo));
      st.u[b.indices[i]] = std::clamp(st.u[b.indices[i]], lo + push, hi - push);
    }
  }
  st.s = c.evaluate(st.u);
  st.z.resize(m);
  st.lambda.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    st.s[i] = std::max(st.s[i], cfg.s_floor);
    st.z[i] = st.mu / (c.weights[i] * st.s[i]);
    st.lambda[i] = -c.weights[i] * st.z[i];
  }

  const double theta0 = norm2_diff(c.evaluate(st.u), st.s);
  const double theta_min = 1e-4 * std::max(1.0, theta0);
  const double theta_max = 1e4 * std::max(1.0, theta0);
  const double kappa_sigma = 1e10;
  Filter filter;
  double last_delta = 0.0;
  std::shared_ptr<FilteredPreconditioner> amgf_cache;
  std::vector<std::size_t> bound_idx;
  if (p.bounds) bound_idx = p.bounds->indices;
  const ContactIndexSet contact = detect_contact_dofs(c.j, bound_idx);

  auto build_preconditioner = [&](PreconditionerKind kind,
                                  const std::shared_ptr<const SparseMatrix>& a)
      -> std::shared_ptr<const LinearOperator> {
    if (kind != PreconditionerKind::kAmgf) return make_preconditioner(kind, a, p, c, cfg.amg);
    AmgConfig acfg = cfg.amg;
    acfg.block_size = p.block_size;
    auto b = AmgHierarchy::setup(a, p.near_nullspace, acfg);
    if (!amgf_cache)
      amgf_cache = std::make_shared<FilteredPreconditioner>(a, b, contact);
    else
      amgf_cache->update(a, b);
    return amgf_cache;
  };

  rep.status = SolveStatus::kMaxIterations;
  for (std::size_t it = 0; it <= cfg.max_ip_iters; ++it) {
    const Residuals r0 = residuals(p, c, st, 0.0);
    rep.e_opt = optimality_error(p, c, st, r0, cfg);
    if (rep.e_opt < cfg.tol_ip) {
      rep.status = SolveStatus::kConverged;
      break;
    }
    if (it == cfg.max_ip_iters) {
      rep.message = "maximum number of IP iterations reached";
      break;
    }
    Residuals r = residuals(p, c, st);
    double e_mu = optimality_error(p, c, st, r, cfg);
    // Several barrier decreases are allowed only before the first step.
    while (e_mu < cfg.kappa_eps * st.mu) {
      const double next = barrier_update(st.mu, cfg);
      if (!(next < st.mu)) break;
      st.mu = next;
      filter.clear();
      r = residuals(p, c, st);
      e_mu = optimality_error(p, c, st, r, cfg);
      if (it > 0) break;
    }

    IterationRecord rec;
    rec.iteration = it;
    rec.mu = st.mu;
    rec.e_opt = rep.e_opt;
    rec.e_opt_mu = e_mu;
    rec.n_c = contact.size();

    // Newton direction with inertia-free regularization.
    double delta = 0.0;
    ReducedSystem sys;
    Vector du;
    while (true) {
      sys = reduced_system(p, c, st, r, delta);
      bool ok = false;
      try {
        auto pc = build_preconditioner(cfg.preconditioner, sys.a);
        auto [x, pr] = pcg(*sys.a, *pc, sys.b, cfg.tol_pcg, cfg.max_pcg_iters);
        rec.pcg_iterations = pr.iterations;
        rec.pcg_converged = pr.converged;
        rec.ritz_min = pr.ritz_min;
        rec.ritz_max = pr.ritz_max;
        Vector ax(n);
        sys.a->multiply(x, ax);
        ok = dot(x, ax) >= cfg.curvature_factor * k_scale * dot(x, x);
        du = std::move(x);
      } catch (const BreakdownError&) {
        ok = false;
      } catch (const NotSpdError&) {
        ok = false;
      }
      if (ok) break;
      delta = delta == 0.0 ? (last_delta == 0.0 ? cfg.delta_min
                                                : std::max(cfg.delta_min, last_delta / 3.0))
                           : 10.0 * delta;
      if (delta > cfg.delta_max) {
        rep.status = SolveStatus::kRegularizationFailure;
        rep.message = "inertia regularization exceeded its limit";
        break;
      }
    }
    if (rep.status == SolveStatus::kRegularizationFailure) break;
    last_delta = delta;
    rec.delta_reg = delta;

    if (cfg.shadow) {
      try {
        auto pc = build_preconditioner(*cfg.shadow, sys.a);
        auto [x, pr] = pcg(*sys.a, *pc, sys.b, cfg.tol_pcg, cfg.max_pcg_iters);
        rec.shadow_pcg_iterations = static_cast<long>(pr.iterations);
        rec.shadow_converged = pr.converged;
      } catch (const Error&) {
        rec.shadow_pcg_iterations = static_cast<long>(cfg.max_pcg_iters);
        rec.shadow_converged = false;
      }
    }
    if (c.num_gap > 0) {
      double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
      for (std::size_t i = 0; i < c.num_gap; ++i) {
        dmin = std::min(dmin, sys.d[i]);
        dmax = std::max(dmax, sys.d[i]);
      }
      rec.cond_d = dmax / dmin;
    }

    const Directions dir = recover_directions(c, st, r, sys, std::move(du));
    if (observer) observer(st, r, sys, dir);

    const double tau = std::max(0.99, 1.0 - st.mu);
    const auto [alpha_max, alpha_d] = fraction_to_boundary(st.s, dir.ds, st.z, dir.dz, tau);

    // Filter line search on the primal step.
    const double theta = norm_inf(r.r_lambda) == 0.0 ? 0.0 : norm2(r.r_lambda);
    const double phi = barrier_objective(p, c, st.u, st.s, st.mu);
    double grad_phi = 0.0;
    {
      Vector ku(n);
      p.k->multiply(st.u, ku);
      for (std::size_t i = 0; i < n; ++i) grad_phi += (ku[i] - p.f[i]) * dir.du[i];
      for (std::size_t i = 0; i < m; ++i) grad_phi -= st.mu * c.weights[i] * dir.ds[i] / st.s[i];
    }
    double alpha = alpha_max;
    bool accepted = false, f_type = false;
    Vector ut(n), stt(m);
    while (alpha >= cfg.alpha_min) {
      for (std::size_t i = 0; i < n; ++i) ut[i] = st.u[i] + alpha * dir.du[i];
      for (std::size_t i = 0; i < m; ++i) stt[i] = st.s[i] + alpha * dir.ds[i];
      const double theta_t = norm2_diff(c.evaluate(ut), stt);
      const double phi_t = barrier_objective(p, c, ut, stt, st.mu);
      const double slack = 10.0 * eps * std::abs(phi);
      if (theta_t <= theta_max && filter.acceptable(theta_t, phi_t)) {
        const bool switching =
            grad_phi < 0.0 && alpha * std::pow(-grad_phi, 2.3) > std::pow(theta, 1.1);
        if (theta <= theta_min && switching) {
          f_type = true;
          accepted = phi_t <= phi + cfg.eta_phi * alpha * grad_phi + slack;
        } else {
          f_type = false;
          accepted = theta_t <= (1.0 - cfg.gamma_theta) * theta ||
                     phi_t <= phi - cfg.gamma_phi * theta + slack;
        }
      }
      if (accepted) break;
      alpha *= 0.5;
    }
    if (!accepted) {
      rep.status = SolveStatus::kLineSearchFailure;
      rep.message = "line search step fell below alpha_min";
      rep.iterations.push_back(rec);
      break;
    }
    if (!f_type) filter.add((1.0 - cfg.gamma_theta) * theta, phi - cfg.gamma_phi * theta);

    st.u = ut;
    st.s = stt;
    for (std::size_t i = 0; i < m; ++i) {
      st.lambda[i] += alpha * dir.dlambda[i];
      const double z = st.z[i] + alpha_d * dir.dz[i];
      st.z[i] = std::clamp(z, st.mu / (kappa_sigma * st.s[i]), kappa_sigma * st.mu / st.s[i]);
    }
    rec.alpha_p = alpha;
    rec.alpha_d = alpha_d;
    rep.iterations.push_back(rec);
  }

  Vector sz(m);
  for (std::size_t i = 0; i < m; ++i) sz[i] = st.s[i] * st.z[i];
  rep.complementarity = m > 0 ? norm_inf(sz) : 0.0;
  if (p.m() > 0) {
    const Vector g = p.gap(st.u);
    rep.min_gap = *std::min_element(g.begin(), g.end());
  }
  return {st.u, std::move(rep)};
}

}  // namespace amgf
