#include "aoimac/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "aoimac/errors.hpp"
#include "aoimac/policy_dpp.hpp"
#include "aoimac/policy_pra.hpp"

namespace aoimac {

namespace {

using nlohmann::json;

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

std::string fmt(const std::optional<double>& value) {
  return value ? fmt(*value) : std::string{};
}

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key)) {
    throw InvalidConfigError("missing required key '" + key + "'");
  }
  if (!j.at(key).is_number()) {
    throw InvalidConfigError("key '" + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw InvalidConfigError("key '" + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

SuccessMatrix matrix_from_json(const json& ch) {
  if (ch.contains("mpr")) {
    const std::string name = ch.at("mpr").get<std::string>();
    if (name == "strong") return strong_mpr();
    if (name == "weak") return weak_mpr();
    throw InvalidConfigError("channel.mpr must be 'strong' or 'weak', got '" + name + "'");
  }
  if (ch.contains("p11")) {
    SuccessMatrix m{require_number(ch, "p11"), require_number(ch, "p112"),
                    require_number(ch, "p22"), require_number(ch, "p212")};
    validate_matrix(m);
    return m;
  }
  if (ch.contains("beta1_db")) {
    const LinkBudget l1{db_to_linear(require_number(ch, "beta1_db")),
                        db_to_linear(require_number(ch, "theta_db"))};
    const LinkBudget l2{db_to_linear(require_number(ch, "beta2_db")), l1.theta};
    return build_matrix(l1, l2);
  }
  if (ch.contains("beta1")) {
    const LinkBudget l1{require_number(ch, "beta1"), require_number(ch, "theta")};
    const LinkBudget l2{require_number(ch, "beta2"), l1.theta};
    return build_matrix(l1, l2);
  }
  throw InvalidConfigError(
      "channel must give 'mpr', explicit probabilities 'p11'..'p212', or link "
      "budgets 'beta1_db'/'beta1'");
}

struct GridPoint {
  double lambda;
  double delta;
  double v;
};

std::vector<GridPoint> resolve_grid(const ExperimentSpec& spec) {
  std::vector<GridPoint> points;
  if (spec.sweep_variable.empty()) {
    points.push_back({spec.lambda, spec.delta, spec.v});
    return points;
  }
  points.reserve(spec.sweep_values.size());
  for (double value : spec.sweep_values) {
    GridPoint p{spec.lambda, spec.delta, spec.v};
    if (spec.sweep_variable == "lambda") {
      p.lambda = value;
    } else if (spec.sweep_variable == "delta") {
      p.delta = value;
    } else {
      p.v = value;
    }
    points.push_back(p);
  }
  return points;
}

}  // namespace

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Pra: return "PRA";
    case PolicyKind::PraOpt: return "PRA-opt";
    case PolicyKind::DppAoi: return "DPP-AoI";
    case PolicyKind::DppPaoi: return "DPP-PAoI";
  }
  return "?";
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "PRA") return PolicyKind::Pra;
  if (name == "PRA-opt") return PolicyKind::PraOpt;
  if (name == "DPP-AoI") return PolicyKind::DppAoi;
  if (name == "DPP-PAoI") return PolicyKind::DppPaoi;
  throw InvalidConfigError("unknown policy '" + name +
                           "' (expected PRA, PRA-opt, DPP-AoI or DPP-PAoI)");
}

SuccessMatrix strong_mpr() { return SuccessMatrix{0.95, 0.63, 0.924, 0.41}; }

SuccessMatrix weak_mpr() { return SuccessMatrix{0.924, 0.515, 0.882, 0.3}; }

std::string mpr_label(const SuccessMatrix& m) {
  if (m.p11 <= 0.0 || m.p22 <= 0.0) return "degenerate";
  return mpr_class(m) == MprClass::Strong ? "strong" : "weak";
}

ExperimentSpec parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw InvalidConfigError("config root must be a JSON object");

  ExperimentSpec spec;
  spec.scenario = j.value("scenario", spec.scenario);
  if (!j.contains("policy")) throw InvalidConfigError("missing required key 'policy'");
  spec.policy = policy_from_string(j.at("policy").get<std::string>());
  spec.lambda = require_number(j, "lambda");
  spec.delta = require_number(j, "delta");
  spec.q1 = number_or(j, "q1", spec.q1);
  spec.q2 = number_or(j, "q2", spec.q2);
  spec.v = number_or(j, "V", spec.v);
  spec.alpha_max = number_or(j, "alpha_max", spec.alpha_max);
  spec.xi = number_or(j, "xi", spec.xi);
  spec.horizon = static_cast<std::uint64_t>(number_or(j, "horizon", static_cast<double>(spec.horizon)));
  spec.burn_in = static_cast<std::uint64_t>(number_or(j, "burn_in", static_cast<double>(spec.burn_in)));
  if (j.contains("channel")) spec.matrix = matrix_from_json(j.at("channel"));
  if (j.contains("seeds")) {
    if (!j.at("seeds").is_array()) throw InvalidConfigError("key 'seeds' must be an array");
    for (const auto& s : j.at("seeds")) {
      if (!s.is_number_unsigned()) {
        throw InvalidConfigError("key 'seeds' must hold unsigned integers");
      }
      spec.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    if (!sw.contains("variable") || !sw.contains("values")) {
      throw InvalidConfigError("sweep needs 'variable' and 'values'");
    }
    spec.sweep_variable = sw.at("variable").get<std::string>();
    for (const auto& v : sw.at("values")) {
      if (!v.is_number()) throw InvalidConfigError("sweep values must be numbers");
      spec.sweep_values.push_back(v.get<double>());
    }
  }
  return spec;
}

void validate_spec(const ExperimentSpec& spec) {
  auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
  if (!in_unit(spec.lambda)) throw InvalidConfigError("lambda must lie in [0, 1]");
  if (!in_unit(spec.delta)) throw InvalidConfigError("delta must lie in [0, 1]");
  if (!in_unit(spec.q1)) throw InvalidConfigError("q1 must lie in [0, 1]");
  if (!in_unit(spec.q2)) throw InvalidConfigError("q2 must lie in [0, 1]");
  if (!std::isfinite(spec.v) || spec.v <= 0.0) throw InvalidConfigError("V must be > 0");
  if (!std::isfinite(spec.alpha_max) || spec.alpha_max <= 0.0) {
    throw InvalidConfigError("alpha_max must be > 0");
  }
  if (!std::isfinite(spec.xi) || spec.xi <= 0.0) throw InvalidConfigError("xi must be > 0");
  if (spec.horizon == 0) throw InvalidConfigError("horizon must be >= 1");
  if (spec.burn_in >= spec.horizon) throw InvalidConfigError("burn_in must be < horizon");
  try {
    validate_matrix(spec.matrix);
  } catch (const InvalidParameterError& e) {
    throw InvalidConfigError(std::string("channel: ") + e.what());
  }
  if (spec.seeds.empty()) throw InvalidConfigError("seeds must not be empty");
  if (!spec.sweep_variable.empty()) {
    if (spec.sweep_variable != "lambda" && spec.sweep_variable != "delta" &&
        spec.sweep_variable != "V") {
      throw InvalidConfigError("sweep variable must be 'lambda', 'delta' or 'V'");
    }
    if (spec.sweep_variable == "V" &&
        (spec.policy == PolicyKind::Pra || spec.policy == PolicyKind::PraOpt)) {
      throw InvalidConfigError("a V sweep needs a DPP policy");
    }
    if (spec.sweep_values.empty()) throw InvalidConfigError("sweep grid must not be empty");
    for (double v : spec.sweep_values) {
      if (spec.sweep_variable == "V") {
        if (!std::isfinite(v) || v <= 0.0) throw InvalidConfigError("swept V values must be > 0");
      } else if (!in_unit(v)) {
        throw InvalidConfigError("swept " + spec.sweep_variable + " values must lie in [0, 1]");
      }
    }
  }
}

std::vector<SimulationRow> run_simulations(const ExperimentSpec& spec, unsigned jobs) {
  validate_spec(spec);
  const std::vector<GridPoint> points = resolve_grid(spec);
  const std::size_t reps = spec.seeds.size();
  std::vector<SimulationRow> rows(points.size() * reps);

  parallel_for(rows.size(), jobs, [&](std::size_t task) {
    const std::size_t point_index = task / reps;
    const std::size_t rep = task % reps;
    const GridPoint& point = points[point_index];

    SimulationRow row;
    row.scenario = spec.scenario;
    row.policy = spec.policy;
    row.mpr = mpr_label(spec.matrix);
    row.lambda = point.lambda;
    row.delta = point.delta;
    row.horizon = spec.horizon;
    row.burn_in = spec.burn_in;
    row.seed = spec.seeds[rep] + point_index;

    SimConfig config{point.lambda, point.delta, spec.horizon, spec.burn_in, row.seed};

    std::unique_ptr<Policy> policy;
    switch (spec.policy) {
      case PolicyKind::Pra:
        row.q1 = spec.q1;
        row.q2 = spec.q2;
        policy = std::make_unique<PraPolicy>(PraParams{spec.q1, spec.q2});
        break;
      case PolicyKind::PraOpt: {
        const OptimalProbabilities opt =
            optimal_probabilities(point.lambda, point.delta, spec.matrix, spec.xi);
        row.q1 = opt.q1_star;
        row.q2 = opt.q2_star;
        row.xi = spec.xi;
        policy = std::make_unique<PraPolicy>(PraParams{opt.q1_star, opt.q2_star});
        break;
      }
      case PolicyKind::DppAoi:
        row.v = point.v;
        policy = std::make_unique<DppAoiPolicy>(spec.matrix, DppAoiParams{point.v});
        break;
      case PolicyKind::DppPaoi:
        row.v = point.v;
        row.alpha_max = spec.alpha_max;
        policy =
            std::make_unique<DppPaoiPolicy>(spec.matrix, DppPaoiParams{point.v, spec.alpha_max});
        break;
    }

    row.metrics = run(config, *policy, spec.matrix);
    rows[task] = std::move(row);
  });
  return rows;
}

void write_simulation_csv(std::ostream& os, const std::vector<SimulationRow>& rows) {
  os << kSimulationCsvHeader << '\n';
  for (const SimulationRow& r : rows) {
    const auto& f = r.metrics.decision_fractions;
    os << r.scenario << ',' << to_string(r.policy) << ',' << r.mpr << ',' << fmt(r.lambda)
       << ',' << fmt(r.delta) << ',' << fmt(r.q1) << ',' << fmt(r.q2) << ',' << fmt(r.v) << ','
       << fmt(r.alpha_max) << ',' << fmt(r.xi) << ',' << r.horizon << ',' << r.burn_in << ','
       << r.seed << ',' << fmt(r.metrics.avg_aoi) << ',' << fmt(r.metrics.avg_paoi) << ','
       << fmt(r.metrics.avg_queue) << ',' << fmt(r.metrics.throughput1) << ','
       << fmt(r.metrics.throughput2) << ',' << fmt(f[3]) << ',' << fmt(f[2]) << ',' << fmt(f[1])
       << ',' << fmt(f[0]) << ',' << (r.metrics.unstable ? 1 : 0) << '\n';
  }
}

std::vector<AnalysisRow> run_analysis(const ExperimentSpec& spec) {
  validate_spec(spec);
  if (spec.policy != PolicyKind::Pra && spec.policy != PolicyKind::PraOpt) {
    throw InvalidConfigError("analyze needs a PRA or PRA-opt policy");
  }
  if (spec.sweep_variable == "V") {
    throw InvalidConfigError("analyze sweeps lambda or delta, not V");
  }

  const std::vector<GridPoint> points = resolve_grid(spec);
  std::vector<AnalysisRow> rows;
  rows.reserve(points.size());
  for (const GridPoint& point : points) {
    AnalysisRow row;
    row.scenario = spec.scenario;
    row.mpr = mpr_label(spec.matrix);
    row.lambda = point.lambda;
    row.delta = point.delta;
    row.infeasible = point.lambda >= spec.matrix.p11;

    double q1 = spec.q1;
    double q2 = spec.q2;
    bool have_probs = spec.policy == PolicyKind::Pra;
    if (spec.policy == PolicyKind::PraOpt && !row.infeasible) {
      try {
        const OptimalProbabilities opt =
            optimal_probabilities(point.lambda, point.delta, spec.matrix, spec.xi);
        q1 = opt.q1_star;
        q2 = opt.q2_star;
        have_probs = true;
      } catch (const DegenerateXiError&) {
        // e.g. delta = 0 leaves no feasible transmit interval; flag the row
        // instead of aborting the sweep
      }
    }
    if (have_probs) {
      row.q1 = q1;
      row.q2 = q2;
      const AnalyticInputs in{point.lambda, point.delta, q1, q2, spec.matrix};
      row.mu = service_probability(in);
      row.stable = is_stable(in);
      if (row.stable && std::min(point.delta, q2) > 0.0) {
        row.p2bar = s2_success_prob(in);
        const RenewalMoments moments = renewal_moments(in);
        row.e_t = moments.e_t;
        row.e_t2 = moments.e_t2;
        row.avg_aoi = avg_aoi_closed_form(in);
        row.avg_paoi = avg_paoi_closed_form(in);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_analysis_csv(std::ostream& os, const std::vector<AnalysisRow>& rows) {
  os << kAnalysisCsvHeader << '\n';
  for (const AnalysisRow& r : rows) {
    os << r.scenario << ',' << r.mpr << ',' << fmt(r.lambda) << ',' << fmt(r.delta) << ','
       << fmt(r.q1) << ',' << fmt(r.q2) << ',' << fmt(r.mu) << ',' << (r.stable ? 1 : 0) << ','
       << fmt(r.p2bar) << ',' << fmt(r.avg_aoi) << ',' << fmt(r.avg_paoi) << ',' << fmt(r.e_t)
       << ',' << fmt(r.e_t2) << ',' << (r.infeasible ? 1 : 0) << '\n';
  }
}

namespace {

std::vector<double> linspace_grid(double first, double last, double step) {
  std::vector<double> values;
  for (double v = first; v <= last + 1e-9; v += step) {
    values.push_back(std::round(v * 1000.0) / 1000.0);
  }
  return values;
}

std::filesystem::path write_rows(const std::filesystem::path& out_dir, const std::string& name,
                                 const std::vector<SimulationRow>& rows) {
  const std::filesystem::path path = out_dir / name;
  std::ofstream os(path);
  if (!os) throw InvalidConfigError("cannot open output file " + path.string());
  write_simulation_csv(os, rows);
  return path;
}

// Running time-average age sampled every `stride` slots, one block per V.
std::filesystem::path write_convergence_csv(const std::filesystem::path& out_dir,
                                            const std::string& name, std::uint64_t root_seed,
                                            std::uint64_t horizon, std::uint64_t stride) {
  const std::filesystem::path path = out_dir / name;
  std::ofstream os(path);
  if (!os) throw InvalidConfigError("cannot open output file " + path.string());
  os << "scenario,policy,mpr,lambda,delta,V,seed,t,running_avg_aoi\n";

  const SuccessMatrix matrix = strong_mpr();
  const double lambda = 0.75;
  const double delta = 0.6;
  for (double v : {20.0, 200.0, 2000.0}) {
    DppAoiPolicy policy(matrix, DppAoiParams{v});
    SimConfig config{lambda, delta, horizon, 0, root_seed};
    std::uint64_t age_sum = 0;
    run_observed(config, policy, matrix,
                 [&](const NetworkState& state, const SlotEvents&, const NetworkState& next) {
                   age_sum += state.age;
                   if (next.t % stride == 0 || next.t == horizon) {
                     os << "fig5,DPP-AoI,strong," << fmt(lambda) << ',' << fmt(delta) << ','
                        << fmt(v) << ',' << root_seed << ',' << next.t << ','
                        << fmt(static_cast<double>(age_sum) / static_cast<double>(next.t))
                        << '\n';
                   }
                 });
  }
  return path;
}

}  // namespace

std::vector<std::filesystem::path> figure_sweep(const std::string& figure_id,
                                                const std::filesystem::path& out_dir,
                                                std::uint64_t root_seed, std::uint64_t horizon,
                                                unsigned jobs) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  const auto lambda_grid = linspace_grid(0.05, 0.85, 0.05);
  const auto delta_grid = linspace_grid(0.05, 1.0, 0.05);

  struct Variant {
    const char* name;
    SuccessMatrix matrix;
  };
  const std::array<Variant, 2> variants{{{"weak", weak_mpr()}, {"strong", strong_mpr()}}};

  auto age_sweep = [&](const std::string& fig, std::vector<PolicyKind> policies,
                       const std::string& variable, const std::vector<double>& grid,
                       std::vector<double> lambdas) {
    for (const Variant& variant : variants) {
      std::vector<SimulationRow> rows;
      for (double lambda : lambdas) {
        for (PolicyKind kind : policies) {
          ExperimentSpec spec;
          spec.scenario = fig;
          spec.policy = kind;
          spec.matrix = variant.matrix;
          spec.lambda = lambda;
          spec.delta = 0.6;
          spec.horizon = horizon;
          spec.seeds = {root_seed};
          spec.sweep_variable = variable;
          spec.sweep_values = grid;
          auto part = run_simulations(spec, jobs);
          rows.insert(rows.end(), part.begin(), part.end());
        }
      }
      written.push_back(write_rows(out_dir, fig + "_" + variant.name + ".csv", rows));
    }
  };

  if (figure_id == "fig3") {
    age_sweep("fig3", {PolicyKind::PraOpt, PolicyKind::DppAoi}, "lambda", lambda_grid, {0.0});
  } else if (figure_id == "fig4") {
    age_sweep("fig4", {PolicyKind::DppAoi}, "lambda", lambda_grid, {0.0});
  } else if (figure_id == "fig5") {
    written.push_back(write_convergence_csv(out_dir, "fig5_strong.csv", root_seed, horizon, 250));
  } else if (figure_id == "fig6") {
    age_sweep("fig6", {PolicyKind::PraOpt, PolicyKind::DppAoi}, "delta", delta_grid, {0.3, 0.7});
  } else if (figure_id == "fig7") {
    age_sweep("fig7", {PolicyKind::PraOpt, PolicyKind::DppPaoi}, "lambda", lambda_grid, {0.0});
  } else if (figure_id == "fig8") {
    age_sweep("fig8", {PolicyKind::PraOpt, PolicyKind::DppPaoi}, "delta", delta_grid, {0.3, 0.7});
  } else {
    throw UsageError("unknown figure id '" + figure_id +
                     "' (expected fig3, fig4, fig5, fig6, fig7 or fig8)");
  }
  return written;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  unsigned workers = jobs;
  if (workers == 0) {
    workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace aoimac
