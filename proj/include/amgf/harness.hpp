#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "amgf/fem.hpp"
#include "amgf/gap.hpp"
#include "amgf/ipm.hpp"

namespace amgf {

enum class ExperimentKind { kTwoBlock, kIroning, kSyntheticSweep, kMatrixFiles };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct MatrixCase {
  std::string matrix;        // MatrixMarket file
  std::string contact_dofs;  // comma/whitespace separated 0-based indices
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kTwoBlock;
  std::size_t dimension = 2;
  std::vector<std::size_t> levels;
  /// 0 selects the problem default (2 for two_block, 10 for ironing).
  std::size_t time_steps = 0;
  std::vector<Material> materials;  // empty: problem defaults
  IpConfig solver;
  GapOptions gap;
  /// Run plain AMG on every Newton system as well (for the comparison column).
  bool compare_amg = true;
  /// Slack of the per-iteration envelope check, in PCG iterations.
  double envelope_tolerance = 2.0;
  std::string output_dir;
  // synthetic_sweep
  double cond_min = 1.0;
  double cond_max = 1e12;
  // matrix_files
  std::vector<MatrixCase> matrices;
  std::size_t block_size = 1;

  /// Throws ConfigError on an empty level list or inconsistent settings.
  void validate() const;
  /// Parses a JSON document; unknown keys are rejected.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
};

/// One Newton system of the IP loop (or one sweep / matrix sample).
struct IterationRow {
  std::size_t level = 0;
  std::size_t step = 0;
  std::size_t ip_iter = 0;
  double mu = 0.0;
  long pcg_amg = -1;  // -1: not run
  long pcg_amgf = -1;
  double bound = 0.0;
  double cond_d = 1.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct StepSummary {
  std::size_t step = 0;
  std::size_t ip_iterations = 0;
  std::string status = "ok";
  long baseline_amg = 0;  // contact-free AMG-PCG count
  double beta = 0.0;
  double bound = 0.0;
  std::size_t n_c = 0;
  std::size_t m = 0;
};

struct RunRecord {
  ExperimentKind kind = ExperimentKind::kTwoBlock;
  std::size_t level = 0;
  std::size_t n = 0;
  std::size_t n_c_max = 0;
  std::size_t m_max = 0;
  std::vector<StepSummary> steps;
  std::vector<IterationRow> rows;
  double k_ip_avg = 0.0;
  double k_amgf_avg = 0.0;
  double bound_avg = 0.0;
  std::string status = "ok";

  /// Recomputes the averages from steps/rows; failed entries are skipped.
  void recompute_averages();
  /// Rows whose AMGF count exceeds bound + tolerance.
  std::size_t envelope_violations(double tolerance) const;
};

/// Contact-free bound: count * sqrt(2 (beta + 3) / beta).
double envelope_bound(long baseline_count, double beta);

/// Runs every level of the experiment. When output_dir is set, writes
/// iterations.csv, summary.csv and summary.txt there. Solver failures are
/// recorded in the rows; the run continues.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

struct Report {
  std::string table;           // plain text, one line per record
  std::string summary_csv;     // one line per record
  std::string iterations_csv;  // level,step,ip_iter,mu,pcg_amg,pcg_amgf,bound,status
};

/// Deterministic fixed-precision rendering. Throws DomainError on an empty
/// record set.
Report emit_report(const std::vector<RunRecord>& records);

/// True when all asserted envelopes of the experiment hold: the AMGF
/// per-iteration bound for time-stepping runs; for the sweep, AMGF varies by
/// < 2x while AMG degrades >= 10x or hits max_it.
bool envelopes_hold(const ExperimentConfig& config, const std::vector<RunRecord>& records);

/// Reads a list of 0-based indices separated by commas or whitespace.
std::vector<std::size_t> read_index_list(const std::string& path);

}  // namespace amgf
