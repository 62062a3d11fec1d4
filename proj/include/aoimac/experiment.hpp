#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aoimac/analysis.hpp"
#include "aoimac/channel.hpp"
#include "aoimac/engine.hpp"

namespace aoimac {

enum class PolicyKind { Pra, PraOpt, DppAoi, DppPaoi };

std::string to_string(PolicyKind kind);
PolicyKind policy_from_string(const std::string& name);  // throws InvalidConfigError

// The two published operating points: link budgets 12 dB / 10 dB with
// decoding threshold -1 dB (strong) or +1 dB (weak), rounded as reported.
SuccessMatrix strong_mpr();
SuccessMatrix weak_mpr();

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// "strong" / "weak"; "degenerate" when the matrix cannot be classified.
std::string mpr_label(const SuccessMatrix& m);

// One experiment: a policy, a channel, base parameters, an optional sweep
// over lambda, delta or V, and replication seeds.
struct ExperimentSpec {
  std::string scenario = "run";
  PolicyKind policy = PolicyKind::Pra;
  SuccessMatrix matrix = strong_mpr();
  double lambda = 0.3;
  double delta = 0.6;
  double q1 = 1.0;
  double q2 = 1.0;
  double v = 200.0;
  double alpha_max = 1.0;
  double xi = 0.001;
  std::uint64_t horizon = 1'000'000;
  std::uint64_t burn_in = 0;
  std::vector<std::uint64_t> seeds;  // empty until resolved by the caller
  std::string sweep_variable;        // "", "lambda", "delta" or "V"
  std::vector<double> sweep_values;
};

// Parses the JSON config format described in the README. Malformed JSON
// throws UsageError (with the parser's line diagnostics); a config that
// parses but fails validation throws InvalidConfigError naming the field.
ExperimentSpec parse_experiment_config(const std::string& json_text);

void validate_spec(const ExperimentSpec& spec);

struct SimulationRow {
  std::string scenario;
  PolicyKind policy = PolicyKind::Pra;
  std::string mpr;
  double lambda = 0.0;
  double delta = 0.0;
  std::optional<double> q1, q2, v, alpha_max, xi;
  std::uint64_t horizon = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 0;
  Metrics metrics;
};

inline constexpr const char* kSimulationCsvHeader =
    "scenario,policy,mpr,lambda,delta,q1,q2,V,alpha_max,xi,horizon,burn_in,seed,"
    "avg_aoi,avg_paoi,avg_q,thpt1,thpt2,frac_11,frac_10,frac_01,frac_00,unstable";

// One row per (grid point x seed), in deterministic (point, seed) order.
// Each run's seed is the listed seed plus the point index, and is recorded
// in the row so it can be reproduced in isolation.
std::vector<SimulationRow> run_simulations(const ExperimentSpec& spec, unsigned jobs = 0);

void write_simulation_csv(std::ostream& os, const std::vector<SimulationRow>& rows);

struct AnalysisRow {
  std::string scenario;
  std::string mpr;
  double lambda = 0.0;
  double delta = 0.0;
  std::optional<double> q1, q2;
  std::optional<double> mu, p2bar, avg_aoi, avg_paoi, e_t, e_t2;
  bool stable = false;
  bool infeasible = false;
};

inline constexpr const char* kAnalysisCsvHeader =
    "scenario,mpr,lambda,delta,q1,q2,mu,stable,p2bar,avg_aoi,avg_paoi,e_t,e_t2,infeasible";

// Closed-form values over the grid; infeasible points are flagged, not fatal.
std::vector<AnalysisRow> run_analysis(const ExperimentSpec& spec);

void write_analysis_csv(std::ostream& os, const std::vector<AnalysisRow>& rows);

// Canned parameter sweeps reproducing the reference experiments; writes CSV
// files under out_dir and returns their paths. Unknown id throws UsageError.
std::vector<std::filesystem::path> figure_sweep(const std::string& figure_id,
                                                const std::filesystem::path& out_dir,
                                                std::uint64_t root_seed, std::uint64_t horizon,
                                                unsigned jobs = 0);

// Runs fn(0), ..., fn(n-1) on a worker pool; the first exception is
// rethrown on the calling thread after the pool drains.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace aoimac
