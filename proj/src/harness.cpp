#include "amgf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "amgf/amg.hpp"
#include "amgf/certify.hpp"
#include "amgf/error.hpp"
#include "amgf/filtered_preconditioner.hpp"
#include "amgf/matrix_market.hpp"
#include "amgf/pcg.hpp"
#include "amgf/time_stepping.hpp"
#include "amgf/vector_ops.hpp"

namespace amgf {

namespace {

using json = nlohmann::json;

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

IpConfig parse_solver(const json& j) {
  check_keys(j,
             {"tol_ip", "tol_pcg", "max_pcg_iters", "mu0", "kappa_eps", "s_max", "kappa_mu",
              "theta_mu", "max_ip_iters", "s_floor", "preconditioner", "delta_min", "delta_max",
              "curvature_factor"},
             "solver");
  IpConfig c;
  c.tol_ip = j.value("tol_ip", c.tol_ip);
  c.tol_pcg = j.value("tol_pcg", c.tol_pcg);
  c.max_pcg_iters = j.value("max_pcg_iters", c.max_pcg_iters);
  c.mu0 = j.value("mu0", c.mu0);
  c.kappa_eps = j.value("kappa_eps", c.kappa_eps);
  c.s_max = j.value("s_max", c.s_max);
  c.kappa_mu = j.value("kappa_mu", c.kappa_mu);
  c.theta_mu = j.value("theta_mu", c.theta_mu);
  c.max_ip_iters = j.value("max_ip_iters", c.max_ip_iters);
  c.s_floor = j.value("s_floor", c.s_floor);
  c.delta_min = j.value("delta_min", c.delta_min);
  c.delta_max = j.value("delta_max", c.delta_max);
  c.curvature_factor = j.value("curvature_factor", c.curvature_factor);
  if (j.contains("preconditioner"))
    c.preconditioner = parse_preconditioner(j.at("preconditioner").get<std::string>());
  if (!(c.tol_ip > 0) || !(c.tol_pcg > 0) || !(c.mu0 > 0) || c.max_pcg_iters == 0)
    throw ConfigError("solver: tolerances, mu0 and max_pcg_iters must be positive");
  return c;
}

Vector sample_rhs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector b(n);
  for (double& v : b) v = dist(rng);
  return b;
}

struct Baseline {
  long count = 0;
  double beta = 0.0;
  double bound = 0.0;
};

// Contact-free AMG-PCG reference for the envelope line. The right-hand side
// is random: the load vector lives on the driven body only, and with the
// bodies decoupled PCG would never see the soft block.
Baseline contact_free_baseline(const std::shared_ptr<const SparseMatrix>& k,
                               const std::vector<Vector>& nns, std::size_t block_size,
                               const IpConfig& solver) {
  AmgConfig acfg = solver.amg;
  acfg.block_size = block_size;
  auto b = AmgHierarchy::setup(k, nns, acfg);
  const Vector rhs = sample_rhs(k->rows(), 7);
  auto [x, rep] = pcg(*k, *b, rhs, solver.tol_pcg, solver.max_pcg_iters);
  Baseline out;
  out.count = static_cast<long>(rep.iterations);
  CertifyOptions copt;
  if (k->rows() <= copt.dense_threshold)
    out.beta = certify_bounds(*k, *b, *b, ContactIndexSet{}, copt).beta;
  else
    out.beta = rep.ritz_min > 0.0 ? 1.0 / rep.ritz_min : 0.0;
  out.bound = envelope_bound(out.count, out.beta);
  return out;
}

ContactSetup make_setup(const ExperimentConfig& c, std::size_t level) {
  if (c.kind == ExperimentKind::kTwoBlock) return build_two_block(c.dimension, level, c.materials);
  return build_ironing(c.dimension, level, c.materials);
}

RunRecord run_time_stepping(const ExperimentConfig& c, std::size_t level) {
  RunRecord rec;
  rec.kind = c.kind;
  rec.level = level;
  const ContactSetup setup = make_setup(c, level);
  const std::size_t steps =
      c.time_steps > 0 ? c.time_steps : (c.kind == ExperimentKind::kTwoBlock ? 2 : 10);
  IpConfig cfg = c.solver;
  cfg.preconditioner = PreconditionerKind::kAmgf;
  if (c.compare_amg) cfg.shadow = PreconditionerKind::kAmg;

  auto observer = [&](std::size_t step, const StepProblem& sp, const SolveReport& report) {
    const ContactProblem& p = sp.problem;
    rec.n = p.n();
    StepSummary sum;
    sum.step = step;
    sum.m = p.m();
    sum.ip_iterations = report.iterations.size();
    sum.status = report.converged() ? "ok" : to_string(report.status);
    const Baseline base = contact_free_baseline(p.k, p.near_nullspace, p.block_size, cfg);
    sum.baseline_amg = base.count;
    sum.beta = base.beta;
    sum.bound = base.bound;
    for (const auto& it : report.iterations) {
      IterationRow row;
      row.level = level;
      row.step = step;
      row.ip_iter = it.iteration;
      row.mu = it.mu;
      row.pcg_amgf = static_cast<long>(it.pcg_iterations);
      row.pcg_amg = it.shadow_pcg_iterations;
      row.bound = base.bound;
      row.cond_d = it.cond_d;
      if (!sum.status.empty() && sum.status != "ok") row.status = sum.status;
      else if (!it.pcg_converged) row.status = "pcg_max_it";
      sum.n_c = std::max(sum.n_c, it.n_c);
      rec.rows.push_back(row);
    }
    rec.n_c_max = std::max(rec.n_c_max, sum.n_c);
    rec.m_max = std::max(rec.m_max, sum.m);
    rec.steps.push_back(sum);
  };
  const TimeStepReport ts = pseudo_time_stepper(setup, steps, cfg, c.gap, observer);
  if (!ts.completed) rec.status = "incomplete";
  return rec;
}

RunRecord run_sweep(const ExperimentConfig& c, std::size_t level) {
  RunRecord rec;
  rec.kind = c.kind;
  rec.level = level;
  const ContactSetup setup = build_two_block(c.dimension, level, c.materials);
  const ElasticSystem sys = assemble_elasticity(setup);
  // The sweep matrix uses the contact Jacobian of the second load step, i.e.
  // after the first step has been solved: the interface is then
  // non-conforming and each gap row couples a node to a mortar segment.
  const Vector rest(setup.mesh.coords.size(), 0.0);
  const StepProblem first = make_step_problem(setup, sys, rest, 1, 2, c.gap);
  IpConfig first_cfg = c.solver;
  first_cfg.shadow.reset();
  auto [u1, rep1] = ip_solve(first.problem, first_cfg);
  if (!rep1.converged()) rec.status = "first_step_failed";
  const StepProblem second = make_step_problem(setup, sys, sys.expand(u1, first.prescribed), 2, 2, c.gap);
  const SparseMatrix& jac = second.problem.j;
  const auto& nns = second.problem.near_nullspace;
  const std::size_t n = sys.k->rows();
  const std::size_t m = jac.rows();
  rec.n = n;
  rec.m_max = m;
  const ContactIndexSet contact = detect_contact_dofs(jac);
  rec.n_c_max = contact.size();
  // Late-barrier pattern: the most separated row stays at D = 1 (inactive),
  // all others are scaled by cond.
  std::size_t loose = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (second.problem.g_ref[i] > second.problem.g_ref[loose]) loose = i;
  const Vector b = sample_rhs(n, 2024);
  const Baseline base = contact_free_baseline(sys.k, nns, c.dimension, c.solver);
  StepSummary sum;
  sum.baseline_amg = base.count;
  sum.beta = base.beta;
  sum.bound = base.bound;
  sum.m = m;
  sum.n_c = contact.size();
  rec.steps.push_back(sum);

  const int k_lo = static_cast<int>(std::lround(std::log10(c.cond_min)));
  const int k_hi = static_cast<int>(std::lround(std::log10(c.cond_max)));
  AmgConfig acfg = c.solver.amg;
  acfg.block_size = c.dimension;
  std::size_t index = 0;
  for (int k = k_lo; k <= k_hi; ++k, ++index) {
    const double cond = std::pow(10.0, k);
    Vector d(m);
    for (std::size_t i = 0; i < m; ++i) d[i] = (i == loose && m > 1) ? 1.0 : cond;
    auto a = std::make_shared<const SparseMatrix>(add(*sys.k, triple_product(jac, DiagonalMatrix(d))));
    IterationRow row;
    row.level = level;
    row.ip_iter = index;
    row.cond_d = cond;
    row.bound = base.bound;
    try {
      auto amg = AmgHierarchy::setup(a, nns, acfg);
      row.pcg_amg = static_cast<long>(pcg(*a, *amg, b, c.solver.tol_pcg, c.solver.max_pcg_iters).second.iterations);
      FilteredPreconditioner amgf(a, amg, contact);
      auto [x, rep] = pcg(*a, amgf, b, c.solver.tol_pcg, c.solver.max_pcg_iters);
      row.pcg_amgf = static_cast<long>(rep.iterations);
      if (!rep.converged) row.status = "pcg_max_it";
    } catch (const BreakdownError&) {
      row.status = "breakdown";
    }
    rec.rows.push_back(row);
  }
  return rec;
}

RunRecord run_matrix_case(const ExperimentConfig& c, std::size_t index) {
  RunRecord rec;
  rec.kind = c.kind;
  rec.level = index;
  const MatrixCase& mc = c.matrices.at(index);
  auto a = std::make_shared<const SparseMatrix>(read_matrix_market(mc.matrix));
  if (!a->is_symmetric(1e-12 * std::max(1.0, a->norm_inf())))
    throw DomainError(mc.matrix + ": matrix is not symmetric");
  ContactIndexSet contact{read_index_list(mc.contact_dofs)};
  rec.n = a->rows();
  rec.n_c_max = contact.size();
  AmgConfig acfg = c.solver.amg;
  acfg.block_size = c.block_size;
  auto amg = AmgHierarchy::setup(a, {}, acfg);
  FilteredPreconditioner amgf(a, amg, contact);
  const Vector b = sample_rhs(a->rows(), 2024);
  IterationRow row;
  row.level = index;
  row.pcg_amg = static_cast<long>(pcg(*a, *amg, b, c.solver.tol_pcg, c.solver.max_pcg_iters).second.iterations);
  auto [x, rep] = pcg(*a, amgf, b, c.solver.tol_pcg, c.solver.max_pcg_iters);
  row.pcg_amgf = static_cast<long>(rep.iterations);
  if (!rep.converged) row.status = "pcg_max_it";
  CertifyOptions copt;
  if (a->rows() <= copt.dense_threshold) {
    // Classical CG bound for the certified condition number.
    const CertifyReport cr = certify_bounds(*a, amgf, *amg, contact, copt);
    row.bound = std::ceil(0.5 * std::sqrt(cr.bound) * std::log(2.0 / c.solver.tol_pcg)) + 5.0;
  }
  rec.rows.push_back(row);
  return rec;
}

std::string fixed(double v, int digits) { return format("%.*f", digits, v); }

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kTwoBlock: return "two_block";
    case ExperimentKind::kIroning: return "ironing";
    case ExperimentKind::kSyntheticSweep: return "synthetic_sweep";
    case ExperimentKind::kMatrixFiles: return "matrix_files";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "two_block") return ExperimentKind::kTwoBlock;
  if (name == "ironing") return ExperimentKind::kIroning;
  if (name == "synthetic_sweep") return ExperimentKind::kSyntheticSweep;
  if (name == "matrix_files") return ExperimentKind::kMatrixFiles;
  throw ConfigError("unknown experiment kind '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (kind == ExperimentKind::kMatrixFiles) {
    if (matrices.empty()) throw ConfigError("matrix_files: no matrices listed");
  } else if (levels.empty()) {
    throw ConfigError("refinement level list is empty");
  }
  if (dimension != 2 && dimension != 3) throw ConfigError("dimension must be 2 or 3");
  if (kind == ExperimentKind::kSyntheticSweep && !(cond_min >= 1.0 && cond_max >= cond_min))
    throw ConfigError("synthetic_sweep: need 1 <= cond_min <= cond_max");
  if (block_size == 0) throw ConfigError("block_size must be positive");
  for (const auto& m : materials) m.validate();
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check_keys(j,
             {"kind", "dimension", "levels", "time_steps", "materials", "solver", "compare_amg",
              "envelope_tolerance", "output_dir", "cond_min", "cond_max", "matrices",
              "block_size", "search_radius"},
             "config");
  ExperimentConfig c;
  try {
    c.kind = parse_experiment_kind(j.value("kind", std::string("two_block")));
    c.dimension = j.value("dimension", c.dimension);
    c.levels = j.value("levels", c.levels);
    c.time_steps = j.value("time_steps", c.time_steps);
    c.compare_amg = j.value("compare_amg", c.compare_amg);
    c.envelope_tolerance = j.value("envelope_tolerance", c.envelope_tolerance);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.cond_min = j.value("cond_min", c.cond_min);
    c.cond_max = j.value("cond_max", c.cond_max);
    c.block_size = j.value("block_size", c.block_size);
    c.gap.search_radius = j.value("search_radius", c.gap.search_radius);
    if (j.contains("solver")) c.solver = parse_solver(j.at("solver"));
    if (j.contains("materials"))
      for (const auto& m : j.at("materials")) {
        check_keys(m, {"E", "nu"}, "materials");
        c.materials.push_back({m.at("E").get<double>(), m.at("nu").get<double>()});
      }
    if (j.contains("matrices"))
      for (const auto& m : j.at("matrices")) {
        check_keys(m, {"matrix", "contact_dofs"}, "matrices");
        c.matrices.push_back({m.at("matrix").get<std::string>(), m.at("contact_dofs").get<std::string>()});
      }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c = from_json_text(ss.str());
  // Relative matrix paths are resolved against the config location.
  const auto base = std::filesystem::path(path).parent_path();
  for (auto& m : c.matrices) {
    if (std::filesystem::path(m.matrix).is_relative()) m.matrix = (base / m.matrix).string();
    if (std::filesystem::path(m.contact_dofs).is_relative())
      m.contact_dofs = (base / m.contact_dofs).string();
  }
  return c;
}

void RunRecord::recompute_averages() {
  double ip = 0.0, pc = 0.0, bd = 0.0;
  std::size_t nip = 0, npc = 0, nbd = 0;
  for (const auto& s : steps)
    if (s.status == "ok" && s.ip_iterations > 0) {
      ip += static_cast<double>(s.ip_iterations);
      ++nip;
    }
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    if (r.pcg_amgf >= 0) {
      pc += static_cast<double>(r.pcg_amgf);
      ++npc;
    }
    if (r.bound > 0.0) {
      bd += r.bound;
      ++nbd;
    }
  }
  k_ip_avg = nip ? ip / static_cast<double>(nip) : 0.0;
  k_amgf_avg = npc ? pc / static_cast<double>(npc) : 0.0;
  bound_avg = nbd ? bd / static_cast<double>(nbd) : 0.0;
}

std::size_t RunRecord::envelope_violations(double tolerance) const {
  std::size_t v = 0;
  for (const auto& r : rows)
    if (r.bound > 0.0 && (r.pcg_amgf < 0 || static_cast<double>(r.pcg_amgf) > r.bound + tolerance))
      ++v;
  return v;
}

double envelope_bound(long baseline_count, double beta) {
  if (!(beta > 0.0)) throw DomainError("envelope_bound: beta must be positive");
  return static_cast<double>(baseline_count) * std::sqrt(2.0 * (beta + 3.0) / beta);
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (!config.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    std::ofstream probe(std::filesystem::path(config.output_dir) / ".write_test");
    if (!probe) throw ConfigError("output directory is not writable: " + config.output_dir);
    probe.close();
    std::filesystem::remove(std::filesystem::path(config.output_dir) / ".write_test", ec);
  }
  std::vector<RunRecord> records;
  const std::size_t count = config.kind == ExperimentKind::kMatrixFiles ? config.matrices.size()
                                                                         : config.levels.size();
  for (std::size_t i = 0; i < count; ++i) {
    RunRecord rec;
    try {
      switch (config.kind) {
        case ExperimentKind::kTwoBlock:
        case ExperimentKind::kIroning: rec = run_time_stepping(config, config.levels[i]); break;
        case ExperimentKind::kSyntheticSweep: rec = run_sweep(config, config.levels[i]); break;
        case ExperimentKind::kMatrixFiles: rec = run_matrix_case(config, i); break;
      }
    } catch (const Error& e) {
      rec.kind = config.kind;
      rec.level = config.kind == ExperimentKind::kMatrixFiles ? i : config.levels[i];
      rec.status = "error";
      std::cerr << "amgf: " << to_string(config.kind) << " level " << rec.level << ": " << e.what()
                << "\n";
    }
    rec.recompute_averages();
    records.push_back(std::move(rec));
  }
  if (!config.output_dir.empty()) {
    const Report rep = emit_report(records);
    const std::filesystem::path dir(config.output_dir);
    std::ofstream(dir / "iterations.csv") << rep.iterations_csv;
    std::ofstream(dir / "summary.csv") << rep.summary_csv;
    std::ofstream(dir / "summary.txt") << rep.table;
  }
  return records;
}

Report emit_report(const std::vector<RunRecord>& records) {
  if (records.empty()) throw DomainError("emit_report: no records");
  Report out;
  out.table = format("%-16s %5s %8s %7s %6s %9s %11s %9s  %s\n", "kind", "level", "n", "n_c_max",
                     "m_max", "k_ip_avg", "k_amgf_avg", "bound", "status");
  out.summary_csv = "kind,level,n,n_c_max,m_max,k_ip_avg,k_amgf_avg,bound_avg,status\n";
  out.iterations_csv = "level,step,ip_iter,mu,pcg_amg,pcg_amgf,bound,cond_d,status\n";
  for (RunRecord r : records) {
    r.recompute_averages();
    const std::string kind = to_string(r.kind);
    out.table += format("%-16s %5zu %8zu %7zu %6zu %9.2f %11.2f %9.2f  %s\n", kind.c_str(), r.level,
                        r.n, r.n_c_max, r.m_max, r.k_ip_avg, r.k_amgf_avg, r.bound_avg,
                        r.status.c_str());
    out.summary_csv += kind + "," + std::to_string(r.level) + "," + std::to_string(r.n) + "," +
                       std::to_string(r.n_c_max) + "," + std::to_string(r.m_max) + "," +
                       fixed(r.k_ip_avg, 2) + "," + fixed(r.k_amgf_avg, 2) + "," +
                       fixed(r.bound_avg, 2) + "," + r.status + "\n";
    for (const auto& row : r.rows)
      out.iterations_csv += std::to_string(row.level) + "," + std::to_string(row.step) + "," +
                            std::to_string(row.ip_iter) + "," + format("%.6e", row.mu) + "," +
                            std::to_string(row.pcg_amg) + "," + std::to_string(row.pcg_amgf) +
                            "," + fixed(row.bound, 2) + "," + format("%.3e", row.cond_d) + "," +
                            row.status + "\n";
  }
  return out;
}

bool envelopes_hold(const ExperimentConfig& config, const std::vector<RunRecord>& records) {
  for (const auto& r : records) {
    if (r.status != "ok") return false;
    if (config.kind == ExperimentKind::kSyntheticSweep) {
      if (r.rows.empty()) return false;
      long lo = r.rows.front().pcg_amgf, hi = lo;
      for (const auto& row : r.rows) {
        if (!row.ok()) return false;
        lo = std::min(lo, row.pcg_amgf);
        hi = std::max(hi, row.pcg_amgf);
      }
      if (!(lo > 0 && static_cast<double>(hi) < 2.0 * static_cast<double>(lo))) return false;
      const long first = r.rows.front().pcg_amg, last = r.rows.back().pcg_amg;
      const bool degraded = last >= 10 * first ||
                            last >= static_cast<long>(config.solver.max_pcg_iters);
      if (!degraded) return false;
    } else {
      for (const auto& s : r.steps)
        if (s.status != "ok") return false;
      if (r.envelope_violations(config.envelope_tolerance) > 0) return false;
    }
  }
  return true;
}

std::vector<std::size_t> read_index_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open index file " + path);
  std::vector<std::size_t> out;
  std::string token;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ls(line);
    while (ls >> token) {
      std::size_t pos = 0;
      long long v = -1;
      try {
        v = std::stoll(token, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != token.size() || v < 0) throw ParseError("invalid index '" + token + "'", line_no);
      out.push_back(static_cast<std::size_t>(v));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace amgf
