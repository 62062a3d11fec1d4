#include "aoimac/engine.hpp"

#include <cmath>
#include <string>

#include "aoimac/errors.hpp"

namespace aoimac {

namespace {

void check_config(const SimConfig& c) {
  if (c.horizon == 0) throw InvalidConfigError("horizon must be >= 1");
  if (c.burn_in >= c.horizon) {
    throw InvalidConfigError("burn_in (" + std::to_string(c.burn_in) +
                             ") must be smaller than horizon (" + std::to_string(c.horizon) + ")");
  }
  if (!std::isfinite(c.lambda) || c.lambda < 0.0 || c.lambda > 1.0) {
    throw InvalidConfigError("lambda must lie in [0, 1]");
  }
  if (!std::isfinite(c.delta) || c.delta < 0.0 || c.delta > 1.0) {
    throw InvalidConfigError("delta must lie in [0, 1]");
  }
}

// Least-squares slope of Q over the last half of the run; the flag is a
// pragmatic divergence detector for sweep hygiene, not a stability proof.
class SlopeAccumulator {
 public:
  explicit SlopeAccumulator(std::uint64_t window_start) : start_(window_start) {}

  void add(std::uint64_t t, std::uint64_t q) {
    const long double k = static_cast<long double>(t - start_);
    const long double qv = static_cast<long double>(q);
    n_ += 1.0L;
    sum_k_ += k;
    sum_kk_ += k * k;
    sum_q_ += qv;
    sum_kq_ += k * qv;
  }

  bool diverging(long double threshold) const {
    if (n_ < 2.0L) return false;
    const long double denom = n_ * sum_kk_ - sum_k_ * sum_k_;
    if (denom <= 0.0L) return false;
    const long double slope = (n_ * sum_kq_ - sum_k_ * sum_q_) / denom;
    return slope > threshold;
  }

 private:
  std::uint64_t start_;
  long double n_ = 0.0L;
  long double sum_k_ = 0.0L;
  long double sum_kk_ = 0.0L;
  long double sum_q_ = 0.0L;
  long double sum_kq_ = 0.0L;
};

// Coercion, arrivals, success draw and the depart-then-arrive updates shared
// by both channel models. The drawer sees the coerced decision only.
template <typename SuccessDraw>
std::pair<NetworkState, SlotEvents> advance(const NetworkState& state, Decision requested,
                                            double lambda, double delta, RngSet& rngs,
                                            SuccessDraw&& draw) {
  SlotEvents ev;
  ev.tx1 = requested.tx1 && state.queue > 0;
  ev.tx2 = requested.tx2 && state.battery > 0;

  // Every stream is consumed the same number of times per slot, so slot
  // traces stay aligned across policies and decisions.
  ev.data_arrival = rngs.data_arrival().bernoulli(lambda);
  ev.energy_arrival = rngs.energy_arrival().bernoulli(delta);
  const auto [b1, b2] = draw(Decision{ev.tx1, ev.tx2}, rngs.success());
  ev.success1 = b1;
  ev.success2 = b2;
  ev.delivered = state.battery_nonempty() && ev.success2 && ev.tx2;

  NetworkState next;
  next.t = state.t + 1;
  // Early departure, late arrival: this slot's arrival is not servable now.
  next.queue = (ev.success1 && state.queue > 0 ? state.queue - 1 : state.queue) +
               (ev.data_arrival ? 1 : 0);
  // Every effective attempt costs one unit, successful or not.
  next.battery = (ev.tx2 && state.battery > 0 ? state.battery - 1 : state.battery) +
                 (ev.energy_arrival ? 1 : 0);
  next.age = aoi_update(state.age, ev.delivered);
  return {next, ev};
}

std::pair<bool, bool> draw_marginal(const SuccessMatrix& matrix, Decision coerced,
                                    RngStream& rng) {
  const auto [p1, p2] = conditional_probs(matrix, coerced);
  const bool b1 = rng.bernoulli(p1);
  const bool b2 = rng.bernoulli(p2);
  return {b1, b2};
}

std::pair<bool, bool> draw_fading(const FadingPair& links, Decision coerced, RngStream& rng) {
  // Unit-exponential channel gains, redrawn every slot for both links.
  const double g1 = -std::log1p(-rng.uniform()) * links.link1.beta;
  const double g2 = -std::log1p(-rng.uniform()) * links.link2.beta;
  bool b1 = false;
  bool b2 = false;
  if (coerced.tx1) b1 = g1 >= links.link1.theta * (coerced.tx2 ? g2 + 1.0 : 1.0);
  if (coerced.tx2) b2 = g2 >= links.link2.theta * (coerced.tx1 ? g1 + 1.0 : 1.0);
  return {b1, b2};
}

template <typename StepFn>
Metrics run_loop(const SimConfig& config, Policy& policy, const StepFn& do_step,
                 const SlotObserver& observer) {
  check_config(config);

  RngSet rngs(config.seed);
  policy.reset();
  NetworkState state;

  const std::uint64_t window = config.horizon - config.burn_in;
  const std::uint64_t slope_start = config.horizon / 2;

  std::uint64_t sum_age = 0;
  std::uint64_t sum_queue = 0;
  std::uint64_t sum_peak_age = 0;
  std::uint64_t peaks = 0;
  std::uint64_t delivered1 = 0;
  std::uint64_t delivered2 = 0;
  std::array<std::uint64_t, 4> decision_counts{};
  SlopeAccumulator slope(slope_start);

  for (std::uint64_t t = 0; t < config.horizon; ++t) {
    const Decision requested = policy.decide(state, rngs.policy());
    auto [next, ev] = do_step(state, requested, rngs);

    if (t >= config.burn_in) {
      sum_age += state.age;
      sum_queue += state.queue;
      decision_counts[static_cast<std::size_t>(decision_index(Decision{ev.tx1, ev.tx2}))] += 1;
      delivered1 += ev.success1 ? 1 : 0;
      if (ev.delivered) {
        delivered2 += 1;
        peaks += 1;
        sum_peak_age += state.age;
      }
    }
    if (t >= slope_start) slope.add(t, state.queue);

    policy.after_slot(state, ev);
    if (observer) observer(state, ev, next);
    state = next;
  }

  Metrics m;
  const double w = static_cast<double>(window);
  m.avg_aoi = static_cast<double>(sum_age) / w;
  m.avg_paoi = peaks > 0 ? static_cast<double>(sum_peak_age) / static_cast<double>(peaks) : 0.0;
  m.peak_count = peaks;
  m.throughput1 = static_cast<double>(delivered1) / w;
  m.throughput2 = static_cast<double>(delivered2) / w;
  m.avg_queue = static_cast<double>(sum_queue) / w;
  for (std::size_t i = 0; i < 4; ++i) {
    m.decision_fractions[i] = static_cast<double>(decision_counts[i]) / w;
  }
  m.unstable = slope.diverging(1e-3L);
  return m;
}

}  // namespace

std::pair<NetworkState, SlotEvents> step(const NetworkState& state, Decision requested,
                                         const SuccessMatrix& matrix, double lambda,
                                         double delta, RngSet& rngs) {
  return advance(state, requested, lambda, delta, rngs,
                 [&](Decision coerced, RngStream& rng) {
                   return draw_marginal(matrix, coerced, rng);
                 });
}

std::pair<NetworkState, SlotEvents> step_fading(const NetworkState& state, Decision requested,
                                                const FadingPair& links, double lambda,
                                                double delta, RngSet& rngs) {
  return advance(state, requested, lambda, delta, rngs,
                 [&](Decision coerced, RngStream& rng) {
                   return draw_fading(links, coerced, rng);
                 });
}

Metrics run(const SimConfig& config, Policy& policy, const SuccessMatrix& matrix) {
  return run_observed(config, policy, matrix, SlotObserver{});
}

Metrics run_observed(const SimConfig& config, Policy& policy, const SuccessMatrix& matrix,
                     const SlotObserver& observer) {
  return run_loop(config, policy,
                  [&](const NetworkState& s, Decision requested, RngSet& rngs) {
                    return step(s, requested, matrix, config.lambda, config.delta, rngs);
                  },
                  observer);
}

Metrics run_fading(const SimConfig& config, Policy& policy, const FadingPair& links) {
  return run_loop(config, policy,
                  [&](const NetworkState& s, Decision requested, RngSet& rngs) {
                    return step_fading(s, requested, links, config.lambda, config.delta, rngs);
                  },
                  SlotObserver{});
}

}  // namespace aoimac
