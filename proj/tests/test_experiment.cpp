#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "aoimac/errors.hpp"
#include "aoimac/experiment.hpp"

using namespace aoimac;

namespace {

const char* kConfig = R"({
  "scenario": "demo",
  "policy": "PRA",
  "lambda": 0.3,
  "delta": 0.6,
  "q1": 1.0,
  "q2": 0.8,
  "horizon": 4000,
  "seeds": [5, 6, 7],
  "channel": {"mpr": "strong"},
  "sweep": {"variable": "lambda", "values": [0.1, 0.2, 0.3, 0.4]}
})";

std::string csv_of(const ExperimentSpec& spec) {
  std::ostringstream ss;
  write_simulation_csv(ss, run_simulations(spec, 2));
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentSpec spec = parse_experiment_config(kConfig);
  CHECK(spec.scenario == "demo");
  CHECK(spec.policy == PolicyKind::Pra);
  CHECK(spec.lambda == 0.3);
  CHECK(spec.delta == 0.6);
  CHECK(spec.q2 == 0.8);
  CHECK(spec.horizon == 4000);
  CHECK(spec.seeds == std::vector<std::uint64_t>{5, 6, 7});
  CHECK(spec.matrix == strong_mpr());
  CHECK(spec.sweep_variable == "lambda");
  CHECK(spec.sweep_values.size() == 4);
}

TEST_CASE("config errors are specific") {
  CHECK_THROWS_AS(parse_experiment_config("{not json"), UsageError);
  try {
    parse_experiment_config(R"({"policy": "PRA", "delta": 0.6})");
    FAIL("missing lambda should not parse");
  } catch (const InvalidConfigError& e) {
    CHECK(std::string(e.what()).find("lambda") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_experiment_config(R"({"policy": "FIFO", "lambda": 0.1, "delta": 0.6})"),
                  InvalidConfigError);
  // interference above the solo probability violates the matrix invariants
  CHECK_THROWS_AS(parse_experiment_config(
                      R"({"policy": "PRA", "lambda": 0.1, "delta": 0.6,
                          "channel": {"p11": 0.5, "p112": 0.6, "p22": 0.9, "p212": 0.4}})"),
                  InvalidParameterError);
}

TEST_CASE("channel sources in the config") {
  const ExperimentSpec db = parse_experiment_config(R"({
    "policy": "PRA", "lambda": 0.1, "delta": 0.6,
    "channel": {"beta1_db": 12, "beta2_db": 10, "theta_db": -1}})");
  CHECK(db.matrix.p11 == doctest::Approx(0.95111650).epsilon(1e-6));
  CHECK(db.matrix.p212 == doctest::Approx(0.40888471).epsilon(1e-6));

  const ExperimentSpec lin = parse_experiment_config(R"({
    "policy": "PRA", "lambda": 0.1, "delta": 0.6,
    "channel": {"beta1": 15.848931924611133, "beta2": 10, "theta": 0.7943282347242815}})");
  CHECK(lin.matrix.p11 == doctest::Approx(db.matrix.p11).epsilon(1e-12));
}

TEST_CASE("spec validation") {
  ExperimentSpec spec = parse_experiment_config(kConfig);
  CHECK_NOTHROW(validate_spec(spec));

  ExperimentSpec no_seeds = spec;
  no_seeds.seeds.clear();
  CHECK_THROWS_AS(validate_spec(no_seeds), InvalidConfigError);

  ExperimentSpec empty_grid = spec;
  empty_grid.sweep_values.clear();
  CHECK_THROWS_AS(validate_spec(empty_grid), InvalidConfigError);

  ExperimentSpec bad_var = spec;
  bad_var.sweep_variable = "mu";
  CHECK_THROWS_AS(validate_spec(bad_var), InvalidConfigError);

  ExperimentSpec bad_lambda = spec;
  bad_lambda.lambda = 1.5;
  CHECK_THROWS_AS(validate_spec(bad_lambda), InvalidConfigError);
}

TEST_CASE("a sweep emits one row per grid point and seed") {
  const ExperimentSpec spec = parse_experiment_config(kConfig);
  const auto rows = run_simulations(spec, 2);
  REQUIRE(rows.size() == 4 * 3);
  // deterministic (point, seed) order with per-point derived seeds
  CHECK(rows[0].lambda == 0.1);
  CHECK(rows[0].seed == 5);
  CHECK(rows[1].seed == 6);
  CHECK(rows[3].lambda == 0.2);
  CHECK(rows[3].seed == 5 + 1);
  for (const auto& row : rows) {
    CHECK(row.q1.has_value());
    CHECK(row.mpr == "strong");
    double sum = 0.0;
    for (double f : row.metrics.decision_fractions) sum += f;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("csv output is stable and carries full provenance") {
  const ExperimentSpec spec = parse_experiment_config(kConfig);
  const std::string a = csv_of(spec);
  const std::string b = csv_of(spec);
  CHECK(a == b);  // byte-identical across runs

  std::istringstream ss(a);
  std::string header;
  std::getline(ss, header);
  CHECK(header == kSimulationCsvHeader);

  std::string row;
  std::getline(ss, row);
  // 23 columns, V/alpha_max empty for PRA
  CHECK(std::count(row.begin(), row.end(), ',') == 22);
  CHECK(row.find("demo,PRA,strong,0.1,0.6,1,0.8,,,,4000,0,5,") == 0);
}

TEST_CASE("optimizer-tuned rows record the tuned probabilities") {
  ExperimentSpec spec = parse_experiment_config(kConfig);
  spec.policy = PolicyKind::PraOpt;
  spec.sweep_variable.clear();
  spec.sweep_values.clear();
  spec.seeds = {9};
  const auto rows = run_simulations(spec, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].q1 == 1.0);
  CHECK(rows[0].q2 == 1.0);  // open-set case at lambda=0.3, delta=0.6
  CHECK(rows[0].xi == 0.001);
  CHECK_FALSE(rows[0].v.has_value());
}

TEST_CASE("infeasible optimizer point aborts with the infeasibility error") {
  ExperimentSpec spec = parse_experiment_config(kConfig);
  spec.policy = PolicyKind::PraOpt;
  spec.sweep_variable.clear();
  spec.sweep_values.clear();
  spec.lambda = 0.96;
  spec.seeds = {9};
  CHECK_THROWS_AS(run_simulations(spec, 2), InfeasibleProblemError);
}

TEST_CASE("closed-form analysis rows") {
  ExperimentSpec spec = parse_experiment_config(kConfig);
  spec.q2 = 1.0;
  spec.sweep_values = {0.0, 0.3, 0.95};
  const auto rows = run_analysis(spec);
  REQUIRE(rows.size() == 3);

  CHECK(rows[0].stable);
  CHECK(rows[0].avg_aoi == doctest::Approx(1.0 / 0.924 / 0.6).epsilon(1e-9));

  CHECK(rows[1].mu == doctest::Approx(0.758).epsilon(1e-12));
  CHECK(rows[1].avg_aoi == doctest::Approx(2.31298396).epsilon(1e-7));
  CHECK(rows[1].avg_paoi == rows[1].avg_aoi);
  CHECK(rows[1].e_t == doctest::Approx(1.0 / 0.6).epsilon(1e-12));
  CHECK_FALSE(rows[1].infeasible);

  // lambda >= p11 is flagged, not fatal
  CHECK(rows[2].infeasible);
  CHECK_FALSE(rows[2].stable);
  CHECK_FALSE(rows[2].avg_aoi.has_value());

  std::ostringstream ss;
  write_analysis_csv(ss, rows);
  std::string header;
  std::istringstream out(ss.str());
  std::getline(out, header);
  CHECK(header == kAnalysisCsvHeader);
}

TEST_CASE("figure sweeps write the expected files") {
  const auto dir = std::filesystem::temp_directory_path() / "aoimac_fig_test";
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(figure_sweep("fig99", dir, 1, 1000, 2), UsageError);

  const auto files = figure_sweep("fig3", dir, 1, 1500, 2);
  REQUIRE(files.size() == 2);
  for (const auto& path : files) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == kSimulationCsvHeader);
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 17 * 2);  // 17 lambda points x {PRA-opt, DPP-AoI}
  }

  const auto fig5 = figure_sweep("fig5", dir, 1, 2000, 2);
  REQUIRE(fig5.size() == 1);
  std::ifstream in(fig5[0]);
  std::string header;
  std::getline(in, header);
  CHECK(header == "scenario,policy,mpr,lambda,delta,V,seed,t,running_avg_aoi");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3 * 8);  // three V curves, 2000 slots sampled every 250

  std::filesystem::remove_all(dir);
}

TEST_CASE("policy names round-trip") {
  for (PolicyKind kind :
       {PolicyKind::Pra, PolicyKind::PraOpt, PolicyKind::DppAoi, PolicyKind::DppPaoi}) {
    CHECK(policy_from_string(to_string(kind)) == kind);
  }
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(db_to_linear(0.0) == 1.0);
}
