#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "amgf/error.hpp"
#include "amgf/harness.hpp"

using namespace amgf;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p.string();
}

RunRecord sample_record() {
  RunRecord r;
  r.level = 1;
  r.n = 100;
  r.steps = {{1, 10, "ok", 20, 1.0, 50.0, 4, 6}, {2, 12, "ok", 20, 1.0, 50.0, 4, 6},
             {3, 99, "max_iterations", 20, 1.0, 50.0, 4, 6}};
  for (std::size_t i = 0; i < 4; ++i) {
    IterationRow row;
    row.step = 1;
    row.ip_iter = i;
    row.pcg_amgf = 10 + static_cast<long>(i);
    row.bound = 50.0;
    r.rows.push_back(row);
  }
  IterationRow bad;
  bad.pcg_amgf = 5000;
  bad.bound = 50.0;
  bad.status = "pcg_max_it";
  r.rows.push_back(bad);
  return r;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config parsing") {
    const ExperimentConfig c = ExperimentConfig::from_json_text(R"({
      "kind": "ironing", "dimension": 3, "levels": [0, 1], "time_steps": 4,
      "materials": [{"E": 1.0, "nu": 0.3}, {"E": 100.0, "nu": 0.2}],
      "solver": {"tol_ip": 1e-8, "preconditioner": "amg"}})");
    CHECK(c.kind == ExperimentKind::kIroning);
    CHECK(c.dimension == 3);
    CHECK(c.levels == std::vector<std::size_t>{0, 1});
    CHECK(c.time_steps == 4);
    REQUIRE(c.materials.size() == 2);
    CHECK(c.materials[1].youngs_modulus == 100.0);
    CHECK(c.solver.tol_ip == 1e-8);
    CHECK(c.solver.preconditioner == PreconditionerKind::kAmg);
    CHECK(c.solver.mu0 == 0.1);
  }

  TEST_CASE("config errors") {
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"levels": []})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"levels": [0], "levles": 1})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"levels": [0], "solver": {"tolip": 1}})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"levels": [0], "dimension": 4})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"levels": [0)"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"kind": "matrix_files"})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"kind": "bogus", "levels": [0]})"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                        R"({"kind": "synthetic_sweep", "levels": [0], "cond_min": 10, "cond_max": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_file("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("experiment kinds") {
    for (auto k : {ExperimentKind::kTwoBlock, ExperimentKind::kIroning, ExperimentKind::kSyntheticSweep,
                   ExperimentKind::kMatrixFiles})
      CHECK(parse_experiment_kind(to_string(k)) == k);
  }

  TEST_CASE("envelope bound") {
    CHECK(envelope_bound(10, 1.0) == doctest::Approx(10.0 * std::sqrt(8.0)));
    CHECK(envelope_bound(10, 1e6) == doctest::Approx(10.0 * std::sqrt(2.0)).epsilon(1e-5));
    CHECK_THROWS_AS(envelope_bound(10, 0.0), DomainError);
  }

  TEST_CASE("averages skip failed entries") {
    RunRecord r = sample_record();
    r.recompute_averages();
    CHECK(r.k_ip_avg == doctest::Approx(11.0));
    CHECK(r.k_amgf_avg == doctest::Approx(11.5));
    CHECK(r.bound_avg == doctest::Approx(50.0));
    CHECK(r.envelope_violations(2.0) == 1);
  }

  TEST_CASE("report") {
    const std::vector<RunRecord> recs{sample_record(), sample_record()};
    const Report a = emit_report(recs), b = emit_report(recs);
    CHECK(a.table == b.table);
    CHECK(a.summary_csv == b.summary_csv);
    CHECK(a.iterations_csv == b.iterations_csv);
    auto lines = [](const std::string& s) { return std::count(s.begin(), s.end(), '\n'); };
    CHECK(lines(a.summary_csv) == 3);
    CHECK(lines(a.table) == 3);
    CHECK(lines(a.iterations_csv) == 11);
    CHECK(a.summary_csv.find("two_block,1,100,0,0,11.00,11.50,50.00,ok") != std::string::npos);
    CHECK_THROWS_AS(emit_report({}), DomainError);
  }

  TEST_CASE("index lists") {
    CHECK(read_index_list(temp_file("amgf_idx1.txt", "3, 1,2\n\n7\t1\n")) ==
          std::vector<std::size_t>{1, 2, 3, 7});
    try {
      read_index_list(temp_file("amgf_idx2.txt", "1 2\n3 x\n"));
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(read_index_list(temp_file("amgf_idx3.txt", "-1\n")), ParseError);
    CHECK_THROWS_AS(read_index_list("/nonexistent/idx"), ConfigError);
  }

  TEST_CASE("sweep run") {
    ExperimentConfig c;
    c.kind = ExperimentKind::kSyntheticSweep;
    c.levels = {0};
    c.cond_max = 1e8;
    const auto recs = run_experiment(c);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].status == "ok");
    CHECK_FALSE(recs[0].rows.empty());
    for (const auto& row : recs[0].rows) CHECK(row.pcg_amgf > 0);
  }
}
