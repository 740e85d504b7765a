#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "amgf/fem.hpp"
#include "amgf/gap.hpp"
#include "amgf/ipm.hpp"

namespace amgf {

/// Linearized contact QP of one pseudo time step. The gap is assembled at
/// the deformed coordinates X + u_prev; K stays on the reference mesh.
struct StepProblem {
  ContactProblem problem;
  GapAssembly gap;
  Vector prescribed;  // full nodal field of the Dirichlet values at this step
};

StepProblem make_step_problem(const ContactSetup& setup, const ElasticSystem& system,
                              std::span<const double> u_prev_full, std::size_t step,
                              std::size_t steps, const GapOptions& options = {});

struct StepResult {
  std::size_t step = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t skipped = 0;
  SolveReport report;
  /// max(0, -min g) of the frozen gap rows at the end of the step.
  double penetration = 0.0;
};

struct TimeStepReport {
  std::vector<StepResult> steps;
  bool completed = false;
  Vector displacement;  // full nodal field after the last successful step
};

/// Called after each step with the problem that was solved.
using StepObserver =
    std::function<void(std::size_t step, const StepProblem& problem, const SolveReport& report)>;

/// Applies the boundary schedule in `steps` increments, solving one QP per
/// increment and re-assembling the gap at the updated configuration. An IP
/// failure stops the sequence; the report then holds the steps done so far.
TimeStepReport pseudo_time_stepper(const ContactSetup& setup, std::size_t steps,
                                   const IpConfig& config = {}, const GapOptions& options = {},
                                   const StepObserver& observer = {});

}  // namespace amgf
