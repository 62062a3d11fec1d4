// aoimac: slotted-time simulator and closed-form analyzer for age-optimal
// scheduling in a two-source multiple-access channel (one grid-connected
// bursty source, one energy-harvesting status updater).
//
// Exit codes: 0 success, 1 validation-suite failure, 2 usage/parse error,
// 3 config validation error, 4 infeasible problem.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoimac/analysis.hpp"
#include "aoimac/errors.hpp"
#include "aoimac/experiment.hpp"
#include "aoimac/validation.hpp"

namespace {

constexpr std::uint64_t kBuiltinSeed = 12345;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw aoimac::UsageError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t env_or_builtin_seed() {
  if (const char* env = std::getenv("AOIMAC_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw aoimac::UsageError("AOIMAC_SEED must be an unsigned integer, got '" +
                               std::string(env) + "'");
    }
  }
  return kBuiltinSeed;
}

// Flags shared by simulate/analyze; every flag overrides the config file.
struct CommonFlags {
  std::string config_path;
  std::optional<double> lambda, delta, q1, q2, v, alpha_max, xi;
  std::optional<std::uint64_t> horizon, burn_in, seed;
  std::optional<std::string> policy, mpr, scenario;
  std::string out_path;
  unsigned jobs = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON experiment config");
    cmd->add_option("--scenario", scenario, "scenario label for the CSV rows");
    cmd->add_option("--policy", policy, "PRA, PRA-opt, DPP-AoI or DPP-PAoI");
    cmd->add_option("--mpr", mpr, "named channel: strong or weak");
    cmd->add_option("--lambda", lambda, "data arrival probability");
    cmd->add_option("--delta", delta, "energy arrival probability");
    cmd->add_option("--q1", q1, "S1 transmit probability (PRA)");
    cmd->add_option("--q2", q2, "S2 transmit probability (PRA)");
    cmd->add_option("--V", v, "penalty weight (DPP)");
    cmd->add_option("--alpha-max", alpha_max, "auxiliary-variable cap (DPP-PAoI)");
    cmd->add_option("--xi", xi, "stability back-off (PRA-opt)");
    cmd->add_option("--horizon", horizon, "slots to simulate");
    cmd->add_option("--burn-in", burn_in, "slots excluded from metrics");
    cmd->add_option("--seed", seed, "root seed (beats AOIMAC_SEED and config)");
    cmd->add_option("--out", out_path, "output CSV path (default stdout)");
    cmd->add_option("--jobs", jobs, "worker threads (default: hardware)");
  }

  aoimac::ExperimentSpec build(bool require_rates) const {
    aoimac::ExperimentSpec spec;
    bool have_lambda = false;
    bool have_delta = false;
    if (!config_path.empty()) {
      spec = aoimac::parse_experiment_config(read_file(config_path));
      have_lambda = have_delta = true;
    }
    if (scenario) spec.scenario = *scenario;
    if (policy) spec.policy = aoimac::policy_from_string(*policy);
    if (mpr) {
      if (*mpr == "strong") {
        spec.matrix = aoimac::strong_mpr();
      } else if (*mpr == "weak") {
        spec.matrix = aoimac::weak_mpr();
      } else {
        throw aoimac::InvalidConfigError("--mpr must be 'strong' or 'weak'");
      }
    }
    if (lambda) { spec.lambda = *lambda; have_lambda = true; }
    if (delta) { spec.delta = *delta; have_delta = true; }
    if (q1) spec.q1 = *q1;
    if (q2) spec.q2 = *q2;
    if (v) spec.v = *v;
    if (alpha_max) spec.alpha_max = *alpha_max;
    if (xi) spec.xi = *xi;
    if (horizon) spec.horizon = *horizon;
    if (burn_in) spec.burn_in = *burn_in;
    if (require_rates) {
      if (!have_lambda) throw aoimac::InvalidConfigError("missing required key 'lambda'");
      if (!have_delta) throw aoimac::InvalidConfigError("missing required key 'delta'");
    }
    if (seed) {
      spec.seeds = {*seed};
    } else if (spec.seeds.empty()) {
      spec.seeds = {env_or_builtin_seed()};
    }
    return spec;
  }
};

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream os(out_path);
  if (!os) throw aoimac::UsageError("cannot open output file '" + out_path + "'");
  os << content;
}

std::vector<double> parse_grid(const std::string& csv, const char* what) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw aoimac::InvalidConfigError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  return values;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Two-source multiple-access AoI scheduling: simulator, closed-form "
               "analysis, optimizer, figure sweeps and cross-validation"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the slot simulator, emit CSV rows");
  CommonFlags sim_flags;
  sim_flags.attach(simulate);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "closed-form values over the grid, emit CSV");
  CommonFlags ana_flags;
  ana_flags.attach(analyze);

  // optimize
  auto* optimize = app.add_subcommand("optimize", "age-optimal transmit probabilities");
  CommonFlags opt_flags;
  opt_flags.attach(optimize);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "canned figure-reproducing sweeps");
  std::string figure_id;
  std::string out_dir = ".";
  std::optional<std::uint64_t> sweep_seed;
  std::uint64_t sweep_horizon = 1'000'000;
  unsigned sweep_jobs = 0;
  sweep->add_option("figure", figure_id, "fig3, fig4, fig5, fig6, fig7 or fig8")->required();
  sweep->add_option("--out-dir", out_dir, "directory for the CSV files");
  sweep->add_option("--seed", sweep_seed, "root seed");
  sweep->add_option("--horizon", sweep_horizon, "slots per run");
  sweep->add_option("--jobs", sweep_jobs, "worker threads");

  // validate
  auto* validate = app.add_subcommand("validate", "run the cross-validation suite");
  aoimac::ValidationOptions vopts;
  std::optional<std::uint64_t> val_seed;
  std::string lambda_grid_csv, delta_grid_csv;
  validate->add_option("--tolerance", vopts.tolerance,
                       "relative tolerance for sim-vs-analytic (default 0.02)");
  validate->add_option("--horizon", vopts.horizon, "slots per run (default 1e6)");
  validate->add_option("--seed", val_seed, "root seed");
  validate->add_option("--jobs", vopts.jobs, "worker threads");
  validate->add_option("--lambda-grid", lambda_grid_csv, "comma list overriding the lambda grid");
  validate->add_option("--delta-grid", delta_grid_csv, "comma list overriding the delta grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (simulate->parsed()) {
    const aoimac::ExperimentSpec spec = sim_flags.build(true);
    const auto rows = aoimac::run_simulations(spec, sim_flags.jobs);
    std::ostringstream ss;
    aoimac::write_simulation_csv(ss, rows);
    write_output(sim_flags.out_path, ss.str());
    return 0;
  }

  if (analyze->parsed()) {
    const aoimac::ExperimentSpec spec = ana_flags.build(true);
    const auto rows = aoimac::run_analysis(spec);
    std::ostringstream ss;
    aoimac::write_analysis_csv(ss, rows);
    write_output(ana_flags.out_path, ss.str());
    return 0;
  }

  if (optimize->parsed()) {
    const aoimac::ExperimentSpec spec = opt_flags.build(true);
    const aoimac::OptimalProbabilities opt =
        aoimac::optimal_probabilities(spec.lambda, spec.delta, spec.matrix, spec.xi);
    const aoimac::AnalyticInputs at{spec.lambda, spec.delta, opt.q1_star, opt.q2_star,
                                    spec.matrix};
    std::ostringstream ss;
    ss << "lambda,delta,mpr,xi,q1_star,q2_star,case,avg_aoi\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%s,%.10g,%.10g,%.10g,%s,%.10g\n", spec.lambda,
                  spec.delta, aoimac::mpr_label(spec.matrix).c_str(), spec.xi, opt.q1_star,
                  opt.q2_star,
                  opt.case_id == aoimac::OptimizerCase::OpenSet ? "OpenSet" : "Boundary",
                  aoimac::avg_aoi_closed_form(at));
    ss << buf;
    write_output(opt_flags.out_path, ss.str());
    return 0;
  }

  if (sweep->parsed()) {
    const std::uint64_t root = sweep_seed ? *sweep_seed : env_or_builtin_seed();
    const auto written = aoimac::figure_sweep(figure_id, out_dir, root, sweep_horizon, sweep_jobs);
    for (const auto& path : written) std::cout << path.string() << '\n';
    return 0;
  }

  if (validate->parsed()) {
    vopts.seed = val_seed ? *val_seed : env_or_builtin_seed();
    if (validate->count("--lambda-grid") > 0) {
      vopts.lambda_grid = parse_grid(lambda_grid_csv, "--lambda-grid");
    }
    if (validate->count("--delta-grid") > 0) {
      vopts.delta_grid = parse_grid(delta_grid_csv, "--delta-grid");
    }
    const auto results = aoimac::run_validation(vopts, std::cout);
    if (aoimac::all_passed(results)) {
      std::cout << "all " << results.size() << " checks passed\n";
      return 0;
    }
    for (const auto& r : results) {
      if (!r.pass) std::cout << "failed: " << r.name << '\n';
    }
    return 1;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const aoimac::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const aoimac::InvalidConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const aoimac::InvalidParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    // infeasible or degenerate problem instances (lambda >= p11, xi swallowing
    // the feasible interval, no positive drift slack, ...)
    std::cerr << "infeasible: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
