#include "amgf/time_stepping.hpp"

#include <algorithm>

#include "amgf/error.hpp"

namespace amgf {

StepProblem make_step_problem(const ContactSetup& setup, const ElasticSystem& system,
                              std::span<const double> u_prev_full, std::size_t step,
                              std::size_t steps, const GapOptions& options) {
  const StructuredMesh& mesh = setup.mesh;
  const std::size_t d = mesh.dim;
  if (u_prev_full.size() != mesh.coords.size()) throw SizeError("step: displacement size");
  Vector coords(mesh.coords);
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] += u_prev_full[i];

  StepProblem out;
  out.gap = assemble_gap(mesh, system.dofs, coords, options);
  out.prescribed = system.prescribed_field(mesh, setup.bc_at(step, steps));

  // Shift the reference gap by the Dirichlet increment of this step.
  Vector jump(coords.size(), 0.0);
  for (std::size_t node : system.constrained_nodes)
    for (std::size_t c = 0; c < d; ++c)
      jump[node * d + c] = out.prescribed[node * d + c] - u_prev_full[node * d + c];
  Vector shift(out.gap.g.size());
  out.gap.j_full.multiply(jump, shift);

  ContactProblem& p = out.problem;
  p.k = system.k;
  p.f = system.load(out.prescribed);
  p.j = out.gap.j;
  p.g_ref = out.gap.g;
  for (std::size_t i = 0; i < shift.size(); ++i) p.g_ref[i] += shift[i];
  p.u_ref.resize(system.dofs.num_free_dofs());
  for (std::size_t fi = 0; fi < system.dofs.free_nodes.size(); ++fi)
    for (std::size_t c = 0; c < d; ++c)
      p.u_ref[fi * d + c] = u_prev_full[system.dofs.free_nodes[fi] * d + c];
  p.m_u = system.mass;
  p.m_s = out.gap.ms;
  p.near_nullspace = free_rigid_body_modes(mesh, system.dofs);
  p.block_size = d;
  return out;
}

TimeStepReport pseudo_time_stepper(const ContactSetup& setup, std::size_t steps,
                                   const IpConfig& config, const GapOptions& options,
                                   const StepObserver& observer) {
  if (steps == 0) throw DomainError("pseudo_time_stepper: steps must be >= 1");
  const ElasticSystem system = assemble_elasticity(setup);
  const std::size_t d = setup.mesh.dim;
  IpConfig cfg = config;
  cfg.warm_start = false;

  TimeStepReport out;
  out.displacement.assign(setup.mesh.coords.size(), 0.0);
  for (std::size_t step = 1; step <= steps; ++step) {
    const StepProblem sp = make_step_problem(setup, system, out.displacement, step, steps, options);
    auto [u, report] = ip_solve(sp.problem, cfg);
    if (observer) observer(step, sp, report);

    StepResult res;
    res.step = step;
    res.n = sp.problem.n();
    res.m = sp.problem.m();
    res.skipped = sp.gap.skipped;
    const bool ok = report.converged();
    if (ok) {
      out.displacement = system.expand(u, sp.prescribed);
      Vector coords(setup.mesh.coords);
      for (std::size_t i = 0; i < coords.size(); ++i) coords[i] += out.displacement[i];
      double gmin = 0.0;
      for (const auto& row : sp.gap.rows) gmin = std::min(gmin, frozen_gap(row, d, coords));
      res.penetration = -gmin;
    }
    res.report = std::move(report);
    out.steps.push_back(std::move(res));
    if (!ok) return out;
  }
  out.completed = true;
  return out;
}

}  // namespace amgf
