// amgf command line: experiment runner, dense certification, D-scaling sweep.
#include <CLI11.hpp>

#include <iostream>
#include <memory>

#include "amgf/amg.hpp"
#include "amgf/certify.hpp"
#include "amgf/error.hpp"
#include "amgf/harness.hpp"
#include "amgf/matrix_market.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir) {
  amgf::ExperimentConfig cfg = amgf::ExperimentConfig::from_file(config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const auto records = amgf::run_experiment(cfg);
  std::cout << amgf::emit_report(records).table;
  const bool ok = amgf::envelopes_hold(cfg, records);
  std::cout << (ok ? "envelopes: hold\n" : "envelopes: VIOLATED\n");
  return ok ? 0 : 1;
}

int certify_command(const std::string& matrix, const std::string& contact_path,
                    const std::string& precond, std::size_t block_size, std::size_t threshold) {
  auto a = std::make_shared<const amgf::SparseMatrix>(amgf::read_matrix_market(matrix));
  amgf::ContactIndexSet contact{amgf::read_index_list(contact_path)};
  amgf::AmgConfig acfg;
  acfg.block_size = block_size;
  acfg.rank_deficiency = amgf::AmgConfig::RankDeficiency::kZeroColumns;
  auto b = amgf::AmgHierarchy::setup(a, {}, acfg);
  amgf::CertifyOptions opt;
  opt.dense_threshold = threshold;
  if (precond != "amgf") {
    const auto rep = amgf::certify_bounds(*a, *b, *b, contact, opt);
    std::cout << amgf::CertifyReport::csv_header() << "\n" << rep.csv_row() << "\n";
    return 0;
  }
  const auto rep = amgf::certify_amgf(*a, *b, contact, amgf::certify_precision_for(*a, opt), opt);
  std::cout << amgf::CertifyReport::csv_header() << "\n" << rep.csv_row() << "\n";
  std::cerr << "precision " << rep.precision << ", ";
  const bool ok = rep.lower_bound_holds() && rep.upper_bound_holds();
  std::cerr << "lower bound " << (rep.lower_bound_holds() ? "holds" : "FAILS") << ", upper bound "
            << (rep.upper_bound_holds() ? "holds" : "FAILS") << "\n";
  return ok ? 0 : 1;
}

int sweep_command(double cond_min, double cond_max, std::size_t level, const std::string& out) {
  amgf::ExperimentConfig cfg;
  cfg.kind = amgf::ExperimentKind::kSyntheticSweep;
  cfg.levels = {level};
  cfg.cond_min = cond_min;
  cfg.cond_max = cond_max;
  cfg.output_dir = out;
  const auto records = amgf::run_experiment(cfg);
  const auto rep = amgf::emit_report(records);
  std::cout << rep.iterations_csv;
  const bool ok = amgf::envelopes_hold(cfg, records);
  std::cout << (ok ? "envelopes: hold\n" : "envelopes: VIOLATED\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AMG with filtering for contact problems"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  std::string matrix, contact, precond = "amgf";
  std::size_t block_size = 1, threshold = 400;
  auto* cert = app.add_subcommand("certify", "Dense spectral certificate for one matrix");
  cert->add_option("--matrix", matrix, "SPD matrix (MatrixMarket)")->required()->check(CLI::ExistingFile);
  cert->add_option("--contact-dofs", contact, "0-based contact DOF indices")->required()->check(CLI::ExistingFile);
  cert->add_option("--precond", precond, "Preconditioner")->check(CLI::IsMember({"amg", "amgf"}));
  cert->add_option("--block-size", block_size, "Unknowns per node for AMG");
  cert->add_option("--dense-threshold", threshold, "Largest n assembled densely");

  double cond_min = 1.0, cond_max = 1e12;
  std::size_t level = 1;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("bench-sweep", "AMG vs AMGF under D scaling (two-block 2D)");
  sweep->add_option("--cond-min", cond_min, "Smallest cond(D)");
  sweep->add_option("--cond-max", cond_max, "Largest cond(D)");
  sweep->add_option("--level", level, "Refinement level");
  sweep->add_option("--out", sweep_out, "Output directory for CSV files");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_command(config_path, out_dir);
    if (*cert) return certify_command(matrix, contact, precond, block_size, threshold);
    if (*sweep) return sweep_command(cond_min, cond_max, level, sweep_out);
  } catch (const amgf::Error& e) {
    std::cerr << "amgf: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
