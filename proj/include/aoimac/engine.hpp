#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>

#include "aoimac/channel.hpp"
#include "aoimac/rng.hpp"

namespace aoimac {

struct SimConfig {
  double lambda = 0.0;           // data arrival probability at S1
  double delta = 0.0;            // energy arrival probability at S2
  std::uint64_t horizon = 0;     // simulated slots
  std::uint64_t burn_in = 0;     // slots excluded from the metric window
  std::uint64_t seed = 0;
};

// Per-slot system state. H(t) = 1{battery > 0} is derived, never stored.
struct NetworkState {
  std::uint64_t t = 0;
  std::uint64_t queue = 0;    // Q(t), data packets at S1
  std::uint64_t battery = 0;  // B(t), energy units at S2
  std::uint64_t age = 1;      // A(t) >= 1, AoI of S2 at the destination

  bool battery_nonempty() const { return battery > 0; }

  friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

// What happened in one slot. tx1/tx2 are the effective attempts after
// coercion (empty queue or battery forces idle), so success implies attempt.
struct SlotEvents {
  bool data_arrival = false;    // a1
  bool energy_arrival = false;  // a2
  bool tx1 = false;             // u1 after coercion
  bool tx2 = false;             // u2 after coercion
  bool success1 = false;        // b1
  bool success2 = false;        // b2
  bool delivered = false;       // Ts = H * b2 * u2
};

struct Metrics {
  double avg_aoi = 0.0;
  double avg_paoi = 0.0;  // mean AoI over delivery slots; 0 when peak_count == 0
  std::uint64_t peak_count = 0;
  double throughput1 = 0.0;  // delivered S1 packets per slot
  double throughput2 = 0.0;  // delivered S2 updates per slot
  double avg_queue = 0.0;
  // Fractions of the coerced decisions, indexed by decision_index().
  std::array<double, 4> decision_fractions{};
  bool unstable = false;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

// A scheduling policy consumed by run(). decide() sees the slot-start state;
// after_slot() lets stateful policies (virtual queues) advance once the
// slot's outcome is known.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Decision decide(const NetworkState& state, RngStream& policy_rng) = 0;
  virtual void after_slot(const NetworkState& /*state*/, const SlotEvents& /*events*/) {}
  virtual void reset() {}
};

// Ts=1 resets the age to 1, otherwise it grows by one slot.
constexpr std::uint64_t aoi_update(std::uint64_t age, bool delivered) noexcept {
  return delivered ? 1 : age + 1;
}

// Advances the system by one slot: coerce the requested decision, draw the
// success bits for the coerced decision and the two arrivals, then apply the
// depart-then-arrive queue/battery updates and the age reset.
std::pair<NetworkState, SlotEvents> step(const NetworkState& state, Decision requested,
                                         const SuccessMatrix& matrix, double lambda,
                                         double delta, RngSet& rngs);

// Called once per slot with the slot-start state, the slot's events and the
// post-update state.
using SlotObserver =
    std::function<void(const NetworkState&, const SlotEvents&, const NetworkState&)>;

// Runs `horizon` slots from (Q=0, B=0, A=1) and accumulates Metrics over
// slots >= burn_in with streaming accumulators. Identical inputs give
// bit-identical Metrics. Throws InvalidConfigError on a bad config.
Metrics run(const SimConfig& config, Policy& policy, const SuccessMatrix& matrix);

Metrics run_observed(const SimConfig& config, Policy& policy, const SuccessMatrix& matrix,
                     const SlotObserver& observer);

// Sensitivity variant of step(): instead of independent Bernoulli draws with
// the marginal probabilities, both small-scale gains are sampled per slot as
// unit exponentials and each active link succeeds iff its SNR/SINR clears the
// threshold. Under a joint transmission this couples the two success bits
// (the marginals still match build_matrix of the same links). Not the
// canonical path.
std::pair<NetworkState, SlotEvents> step_fading(const NetworkState& state, Decision requested,
                                                const FadingPair& links, double lambda,
                                                double delta, RngSet& rngs);

Metrics run_fading(const SimConfig& config, Policy& policy, const FadingPair& links);

}  // namespace aoimac
