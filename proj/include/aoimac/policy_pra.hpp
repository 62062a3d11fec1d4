#pragma once

#include "aoimac/engine.hpp"

namespace aoimac {

// Probabilistic random access: each node flips its own coin whenever it has
// something to send.
struct PraParams {
  double q1 = 1.0;  // S1 transmit probability when the queue is non-empty
  double q2 = 1.0;  // S2 sample-and-transmit probability when the battery is non-empty
};

// Two independent coins per slot, gated by queue/battery occupancy. Both
// coins are always drawn so the policy stream advances identically for any
// state trajectory.
Decision pra_decide(const NetworkState& state, const PraParams& params, RngStream& rng);

class PraPolicy final : public Policy {
 public:
  explicit PraPolicy(PraParams params) : params_(params) {}

  Decision decide(const NetworkState& state, RngStream& policy_rng) override {
    return pra_decide(state, params_, policy_rng);
  }

 private:
  PraParams params_;
};

}  // namespace aoimac
