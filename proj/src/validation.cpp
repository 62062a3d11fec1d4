#include "aoimac/validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <utility>

#include "aoimac/analysis.hpp"
#include "aoimac/channel.hpp"
#include "aoimac/engine.hpp"
#include "aoimac/errors.hpp"
#include "aoimac/experiment.hpp"
#include "aoimac/policy_dpp.hpp"
#include "aoimac/policy_pra.hpp"

namespace aoimac {

namespace {

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", value);
  return buf;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

void emit(std::ostream& out, std::vector<CheckResult>& results, CheckResult result) {
  out << (result.pass ? "PASS" : "FAIL") << "  " << result.name << ": " << result.detail
      << '\n';
  out.flush();
  results.push_back(std::move(result));
}

struct Variant {
  const char* name;
  SuccessMatrix matrix;
};

std::array<Variant, 2> variants() {
  return {{{"strong", strong_mpr()}, {"weak", weak_mpr()}}};
}

// ---- check 1: matrix built from the dB link budgets reproduces the
//      reference operating points entry by entry.
CheckResult check_channel_reproduction() {
  const LinkBudget s1{db_to_linear(12.0), db_to_linear(-1.0)};
  const LinkBudget s2{db_to_linear(10.0), db_to_linear(-1.0)};
  const LinkBudget w1{db_to_linear(12.0), db_to_linear(1.0)};
  const LinkBudget w2{db_to_linear(10.0), db_to_linear(1.0)};
  const SuccessMatrix strong = build_matrix(s1, s2);
  const SuccessMatrix weak = build_matrix(w1, w2);

  const std::array<const char*, 8> label{"strong p11", "strong p112", "strong p22",
                                         "strong p212", "weak p11",   "weak p112",
                                         "weak p22",    "weak p212"};
  const std::array<double, 8> got{strong.p11, strong.p112, strong.p22, strong.p212,
                                  weak.p11,  weak.p112,  weak.p22,  weak.p212};
  const std::array<double, 8> want{0.95, 0.63, 0.924, 0.41, 0.924, 0.515, 0.882, 0.3};
  double worst = 0.0;
  std::string worst_at;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double err = std::abs(got[i] - want[i]);
    if (err > worst) {
      worst = err;
      worst_at = std::string(" at ") + label[i] + " (built " + fmt(got[i]) + " vs reference " +
                 fmt(want[i]) + ")";
    }
  }
  // The weak p212 reference value 0.3 is a one-decimal rounding of the exact
  // 0.29437, which already sits 0.0056 away; that single entry cannot meet
  // the 0.005 limit under the stated link budgets.
  return {"channel-reproduction", worst <= 0.005,
          "worst |entry error| = " + fmt(worst) + worst_at + " (limit 0.005)"};
}

// Shared runs for checks 2 and 3: optimizer-tuned PRA over the
// lambda x delta x matrix grid.
struct PraGridPoint {
  double lambda, delta;
  std::string mpr;
  double analytic_aoi = 0.0;
  Metrics metrics;
};

std::vector<PraGridPoint> run_pra_grid(const ValidationOptions& o) {
  std::vector<PraGridPoint> points;
  for (const Variant& variant : variants()) {
    for (double lambda : o.lambda_grid) {
      if (lambda >= variant.matrix.p11) continue;  // no stable point exists
      for (double delta : o.delta_grid) {
        PraGridPoint p;
        p.lambda = lambda;
        p.delta = delta;
        p.mpr = variant.name;
        points.push_back(p);
      }
    }
  }
  parallel_for(points.size(), o.jobs, [&](std::size_t i) {
    PraGridPoint& p = points[i];
    const SuccessMatrix matrix = p.mpr == "strong" ? strong_mpr() : weak_mpr();
    const OptimalProbabilities opt = optimal_probabilities(p.lambda, p.delta, matrix, 0.001);
    const AnalyticInputs in{p.lambda, p.delta, opt.q1_star, opt.q2_star, matrix};
    p.analytic_aoi = avg_aoi_closed_form(in);
    PraPolicy policy(PraParams{opt.q1_star, opt.q2_star});
    const SimConfig config{p.lambda, p.delta, o.horizon, 0, o.seed + i};
    p.metrics = run(config, policy, matrix);
  });
  return points;
}

// The closed form is a renewal expression whose second moment assumes the
// interferer's busy state is independent across update attempts. The mean
// peak age is rate-exact, so it tracks the formula everywhere; the mean age
// inflates where attempts are frequent relative to the interferer's busy
// periods (delta = 1 and the weak matrix at delta = 0.6). Both checks report
// that structure rather than hiding it.
CheckResult check_sim_vs_analytic(const std::vector<PraGridPoint>& grid, double tolerance) {
  double worst = 0.0;
  double worst_paoi = 0.0;
  std::size_t within = 0;
  std::string worst_at;
  for (const PraGridPoint& p : grid) {
    const double err = rel_err(p.metrics.avg_aoi, p.analytic_aoi);
    worst_paoi = std::max(worst_paoi, rel_err(p.metrics.avg_paoi, p.analytic_aoi));
    if (err <= tolerance) ++within;
    if (err > worst) {
      worst = err;
      worst_at = " at (lambda=" + fmt(p.lambda) + ", delta=" + fmt(p.delta) + ", " + p.mpr + ")";
    }
  }
  const bool enough = grid.size() >= 20;
  return {"sim-vs-analytic-aoi",
          enough && worst <= tolerance,
          std::to_string(within) + "/" + std::to_string(grid.size()) +
              " points within tolerance, worst avg-age rel err = " + fmt(worst) + worst_at +
              " (limit " + fmt(tolerance) + "); peak-age vs the same formula is rate-exact, " +
              "worst rel err = " + fmt(worst_paoi)};
}

CheckResult check_aoi_paoi_equality(const std::vector<PraGridPoint>& grid) {
  double worst_sim = 0.0;
  std::string worst_at;
  double worst_closed = 0.0;
  for (const PraGridPoint& p : grid) {
    const double gap = std::abs(p.metrics.avg_aoi - p.metrics.avg_paoi) / p.metrics.avg_aoi;
    if (gap > worst_sim) {
      worst_sim = gap;
      worst_at = " at (lambda=" + fmt(p.lambda) + ", delta=" + fmt(p.delta) + ", " + p.mpr + ")";
    }
    const SuccessMatrix matrix = p.mpr == "strong" ? strong_mpr() : weak_mpr();
    const OptimalProbabilities opt = optimal_probabilities(p.lambda, p.delta, matrix, 0.001);
    const AnalyticInputs in{p.lambda, p.delta, opt.q1_star, opt.q2_star, matrix};
    worst_closed =
        std::max(worst_closed, std::abs(avg_aoi_closed_form(in) - avg_paoi_closed_form(in)));
  }
  return {"aoi-paoi-equality", worst_sim <= 0.015 && worst_closed == 0.0,
          "worst simulated rel gap = " + fmt(worst_sim) + worst_at +
              " (limit 0.015), closed-form gap = " + fmt(worst_closed) +
              "; the simulated gap is the same attempt-correlation effect seen in "
              "sim-vs-analytic-aoi"};
}

// ---- check 4: direct closed form vs the renewal-moment route on random
//      stable parameter points.
CheckResult check_two_path_agreement() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int accepted = 0;
  while (accepted < 1000) {
    SuccessMatrix m;
    m.p11 = 0.3 + 0.7 * unit(gen);
    m.p112 = m.p11 * unit(gen);
    m.p22 = 0.3 + 0.7 * unit(gen);
    m.p212 = m.p22 * unit(gen);
    const AnalyticInputs in{0.9 * unit(gen), 0.05 + 0.95 * unit(gen), 0.05 + 0.95 * unit(gen),
                            0.05 + 0.95 * unit(gen), m};
    if (!is_stable(in)) continue;
    const double direct = avg_aoi_closed_form(in);
    const RenewalMoments mom = renewal_moments(in);
    const double via_moments = mom.e_x2 / (2.0 * mom.e_x) + 0.5;
    worst = std::max(worst, rel_err(via_moments, direct));
    ++accepted;
  }
  return {"two-path-agreement", worst <= 1e-9,
          "1000 stable points, worst rel gap = " + fmt(worst) + " (limit 1e-9)"};
}

// ---- check 5: Monte Carlo sampling of the inter-attempt gap against the
//      closed-form first two moments. The sampler draws the gap as a
//      geometric (battery already charged) or a sum of two geometrics
//      (wait for energy, then for the transmit coin), independently of the
//      moment formulas being checked.
std::uint64_t sample_geometric(RngStream& rng, double p) {
  if (p >= 1.0) return 1;
  const double u = rng.uniform();
  return 1 + static_cast<std::uint64_t>(std::log1p(-u) / std::log1p(-p));
}

CheckResult check_moment_oracle(std::uint64_t seed) {
  const std::array<std::pair<double, double>, 3> cases{
      {{0.6, 0.8}, {0.3, 0.9}, {1.0, 0.5}}};
  double worst = 0.0;
  for (const auto& [delta, q2] : cases) {
    RngStream rng(seed++);
    const double p_empty = delta == 1.0 ? 0.0 : 1.0 - delta / q2;
    constexpr std::uint64_t kDraws = 1'000'000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::uint64_t i = 0; i < kDraws; ++i) {
      std::uint64_t t = sample_geometric(rng, q2);
      if (p_empty > 0.0 && rng.uniform() < p_empty) t += sample_geometric(rng, delta);
      sum += static_cast<double>(t);
      sum2 += static_cast<double>(t) * static_cast<double>(t);
    }
    const double m = std::min(delta, q2);
    const double want_et = 1.0 / m;
    const double want_et2 = (2.0 - m) / (m * m);
    worst = std::max({worst, rel_err(sum / kDraws, want_et), rel_err(sum2 / kDraws, want_et2)});
  }
  return {"inter-attempt-moment-oracle", worst <= 0.005,
          "worst rel err over E[T], E[T^2] = " + fmt(worst) + " (limit 0.005)"};
}

// Shared runs for checks 6 and 7: DPP-AoI and optimizer-tuned PRA over the
// lambda grid at delta = 0.6, three paired seeds per point.
struct DominancePoint {
  double lambda = 0.0;
  std::string mpr;
  double pra_aoi = 0.0;      // mean over seeds
  double dpp_aoi = 0.0;      // mean over seeds
  double dpp_frac_11 = 0.0;  // worst over seeds
};

std::vector<DominancePoint> run_dominance_grid(const ValidationOptions& o) {
  const std::array<double, 7> lambdas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  constexpr std::size_t kSeeds = 3;
  std::vector<DominancePoint> points;
  for (const Variant& variant : variants()) {
    for (double lambda : lambdas) {
      DominancePoint p;
      p.lambda = lambda;
      p.mpr = variant.name;
      points.push_back(p);
    }
  }

  std::vector<Metrics> outcomes(points.size() * 2 * kSeeds);
  parallel_for(outcomes.size(), o.jobs, [&](std::size_t task) {
    const std::size_t i = task / (2 * kSeeds);
    const bool dpp = (task % (2 * kSeeds)) / kSeeds == 1;
    const std::size_t rep = task % kSeeds;
    const DominancePoint& p = points[i];
    const SuccessMatrix matrix = p.mpr == "strong" ? strong_mpr() : weak_mpr();
    // Identical seeds for the two policies at the same point: paired
    // comparison on common arrival sample paths.
    const SimConfig config{p.lambda, 0.6, o.horizon, 0, o.seed + 1000 + i * kSeeds + rep};
    if (dpp) {
      DppAoiPolicy policy(matrix, DppAoiParams{200.0});
      outcomes[task] = run(config, policy, matrix);
    } else {
      const OptimalProbabilities opt = optimal_probabilities(p.lambda, 0.6, matrix, 0.001);
      PraPolicy policy(PraParams{opt.q1_star, opt.q2_star});
      outcomes[task] = run(config, policy, matrix);
    }
  });

  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t rep = 0; rep < kSeeds; ++rep) {
      const Metrics& pra = outcomes[i * 2 * kSeeds + rep];
      const Metrics& dpp = outcomes[i * 2 * kSeeds + kSeeds + rep];
      points[i].pra_aoi += pra.avg_aoi / kSeeds;
      points[i].dpp_aoi += dpp.avg_aoi / kSeeds;
      points[i].dpp_frac_11 =
          std::max(points[i].dpp_frac_11, dpp.decision_fractions[decision_index({true, true})]);
    }
  }
  return points;
}

CheckResult check_dpp_dominance(const std::vector<DominancePoint>& grid) {
  bool pass = true;
  double worst_ratio = 0.0;
  std::string worst_at;
  for (const DominancePoint& p : grid) {
    const double ratio = p.dpp_aoi / p.pra_aoi;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_at = " at (lambda=" + fmt(p.lambda) + ", " + p.mpr + ")";
    }
    if (p.dpp_aoi > 1.02 * p.pra_aoi) pass = false;
  }
  return {"dpp-vs-pra-dominance", pass,
          "worst DPP/PRA average-AoI ratio = " + fmt(worst_ratio) + worst_at + " (limit 1.02)"};
}

CheckResult check_weak_time_sharing(const std::vector<DominancePoint>& grid) {
  double worst = 0.0;
  for (const DominancePoint& p : grid) {
    if (p.mpr == "weak") worst = std::max(worst, p.dpp_frac_11);
  }
  return {"weak-mpr-time-sharing", worst < 0.001,
          "worst concurrent-transmission fraction under weak MPR = " + fmt(worst) +
              " (limit 0.001)"};
}

CheckResult check_no_idle(const ValidationOptions& o) {
  const std::array<double, 6> lambdas{0.45, 0.5, 0.55, 0.6, 0.65, 0.7};
  struct Cell {
    double lambda;
    std::string mpr;
    double frac_00 = 0.0;
  };
  std::vector<Cell> cells;
  for (const Variant& variant : variants()) {
    for (double lambda : lambdas) cells.push_back({lambda, variant.name, 0.0});
  }
  parallel_for(cells.size(), o.jobs, [&](std::size_t i) {
    Cell& c = cells[i];
    const SuccessMatrix matrix = c.mpr == "strong" ? strong_mpr() : weak_mpr();
    DppAoiPolicy policy(matrix, DppAoiParams{200.0});
    const SimConfig config{c.lambda, 0.6, o.horizon, 0, o.seed + 5000 + i};
    c.frac_00 = run(config, policy, matrix).decision_fractions[decision_index({false, false})];
  });
  double worst = 0.0;
  for (const Cell& c : cells) worst = std::max(worst, c.frac_00);
  return {"no-idle-saturation", worst <= 0.01,
          "worst idle fraction for lambda >= 0.45 = " + fmt(worst) + " (limit 0.01)"};
}

CheckResult check_backlog_bound(const ValidationOptions& o) {
  struct Cell {
    DppMode mode;
    double lambda;
    std::string mpr;
    double avg_q = 0.0;
    double bound = 0.0;
  };
  std::vector<Cell> cells;
  for (DppMode mode : {DppMode::Aoi, DppMode::Paoi}) {
    for (double lambda : {0.3, 0.7}) {
      for (const Variant& variant : variants()) {
        cells.push_back({mode, lambda, variant.name, 0.0, 0.0});
      }
    }
  }
  parallel_for(cells.size(), o.jobs, [&](std::size_t i) {
    Cell& c = cells[i];
    const SuccessMatrix matrix = c.mpr == "strong" ? strong_mpr() : weak_mpr();
    c.bound = backlog_bound(c.mode, c.lambda, 0.6, matrix, 200.0, 1.0);
    const SimConfig config{c.lambda, 0.6, o.horizon, 0, o.seed + 7000 + i};
    if (c.mode == DppMode::Aoi) {
      DppAoiPolicy policy(matrix, DppAoiParams{200.0});
      c.avg_q = run(config, policy, matrix).avg_queue;
    } else {
      DppPaoiPolicy policy(matrix, DppPaoiParams{200.0, 1.0});
      c.avg_q = run(config, policy, matrix).avg_queue;
    }
  });
  bool pass = true;
  double worst_ratio = 0.0;
  for (const Cell& c : cells) {
    const double ratio = c.avg_q / c.bound;
    worst_ratio = std::max(worst_ratio, ratio);
    if (c.avg_q > c.bound) pass = false;
  }
  return {"backlog-bound-certificate", pass,
          "worst avg-backlog / bound = " + fmt(worst_ratio) + " (limit 1)"};
}

// Brute force over the 0.01-step (q1, q2) grid at the two reference
// operating points. Open-set outputs must attain the grid minimum; boundary
// outputs must sit within one grid step of the stability threshold, where
// the grid argmin lands (the closed-form value at the optimizer point can
// legitimately sit a fraction of a grid step above the restricted minimum).
CheckResult check_optimizer_brute_force() {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_gap = 0.0;
  double worst_boundary = 0.0;
  bool pass = true;

  for (int draw = 0; draw < 10; ++draw) {
    const SuccessMatrix matrix = draw % 2 == 0 ? strong_mpr() : weak_mpr();
    const double lambda = 0.85 * matrix.p11 * unit(gen);
    const double delta = 0.1 + 0.9 * unit(gen);

    const OptimalProbabilities opt = optimal_probabilities(lambda, delta, matrix, 0.001);
    const double opt_aoi =
        avg_aoi_closed_form({lambda, delta, opt.q1_star, opt.q2_star, matrix});

    double best = std::numeric_limits<double>::infinity();
    double best_q2 = -1.0;
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; j <= 100; ++j) {
        const AnalyticInputs in{lambda, delta, i / 100.0, j / 100.0, matrix};
        if (!is_stable(in) || std::min(delta, in.q2) <= 0.0) continue;
        if (s2_success_prob(in) <= 0.0) continue;
        const double a = avg_aoi_closed_form(in);
        if (a < best) {
          best = a;
          best_q2 = in.q2;
        }
      }
    }

    if (opt.case_id == OptimizerCase::OpenSet) {
      worst_gap = std::max(worst_gap, opt_aoi - best);
      if (opt_aoi > best + 1e-6) pass = false;
    } else {
      worst_boundary = std::max(worst_boundary, std::abs(best_q2 - opt.q2_star));
      if (std::abs(best_q2 - opt.q2_star) > 0.01 + 1e-9) pass = false;
    }
  }
  return {"optimizer-brute-force", pass,
          "open-set worst gap = " + fmt(worst_gap) + " (limit 1e-6), boundary worst |q2 - q2*| = " +
              fmt(worst_boundary) + " (limit 0.01)"};
}

CheckResult check_v_tradeoff(const ValidationOptions& o) {
  const std::array<double, 3> vs{20.0, 200.0, 2000.0};
  const SuccessMatrix matrix = strong_mpr();
  std::array<double, 3> terminal{};
  std::array<std::uint64_t, 3> convergence{};

  parallel_for(vs.size(), o.jobs, [&](std::size_t i) {
    const SimConfig config{0.75, 0.6, o.horizon, 0, o.seed + 9000};
    DppAoiPolicy policy(matrix, DppAoiParams{vs[i]});
    terminal[i] = run(config, policy, matrix).avg_aoi;

    // Same seed, second pass: the trace is identical, so the running average
    // can be compared against the terminal value slot by slot.
    DppAoiPolicy policy2(matrix, DppAoiParams{vs[i]});
    std::uint64_t age_sum = 0;
    std::uint64_t last_outside = 0;
    run_observed(config, policy2, matrix,
                 [&](const NetworkState& state, const SlotEvents&, const NetworkState& next) {
                   age_sum += state.age;
                   const double running =
                       static_cast<double>(age_sum) / static_cast<double>(next.t);
                   if (std::abs(running - terminal[i]) > 0.05 * terminal[i]) {
                     last_outside = next.t;
                   }
                 });
    convergence[i] = last_outside + 1;
  });

  const bool monotone = terminal[0] >= terminal[1] && terminal[1] >= terminal[2];
  const bool slower = convergence[2] > convergence[0];
  return {"v-tradeoff-convergence", monotone && slower,
          "terminal AoI = {" + fmt(terminal[0]) + ", " + fmt(terminal[1]) + ", " +
              fmt(terminal[2]) + "} for V = {20, 200, 2000} (non-increasing required); "
              "slots to within 5% of terminal = {" +
              std::to_string(convergence[0]) + ", " + std::to_string(convergence[1]) + ", " +
              std::to_string(convergence[2]) + "} (V = 2000 must exceed V = 20)"};
}

void check_options(const ValidationOptions& o) {
  if (o.lambda_grid.empty() || o.delta_grid.empty()) {
    throw InvalidConfigError("validation grids must not be empty");
  }
  if (!(o.tolerance > 0.0)) throw InvalidConfigError("tolerance must be > 0");
  if (o.horizon < 2) throw InvalidConfigError("horizon must be >= 2");
  for (double l : o.lambda_grid) {
    if (!(l >= 0.0 && l <= 1.0)) throw InvalidConfigError("lambda grid values must lie in [0, 1]");
  }
  for (double d : o.delta_grid) {
    if (!(d > 0.0 && d <= 1.0)) throw InvalidConfigError("delta grid values must lie in (0, 1]");
  }
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

std::vector<CheckResult> run_validation(const ValidationOptions& options, std::ostream& out) {
  check_options(options);
  std::vector<CheckResult> results;

  emit(out, results, check_channel_reproduction());

  const std::vector<PraGridPoint> grid = run_pra_grid(options);
  emit(out, results, check_sim_vs_analytic(grid, options.tolerance));
  emit(out, results, check_aoi_paoi_equality(grid));
  emit(out, results, check_two_path_agreement());
  emit(out, results, check_moment_oracle(options.seed + 100));

  const std::vector<DominancePoint> dominance = run_dominance_grid(options);
  emit(out, results, check_dpp_dominance(dominance));
  emit(out, results, check_weak_time_sharing(dominance));

  emit(out, results, check_no_idle(options));
  emit(out, results, check_backlog_bound(options));
  emit(out, results, check_optimizer_brute_force());
  emit(out, results, check_v_tradeoff(options));

  return results;
}

}  // namespace aoimac
