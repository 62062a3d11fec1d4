#include "aoimac/policy_pra.hpp"

namespace aoimac {

Decision pra_decide(const NetworkState& state, const PraParams& params, RngStream& rng) {
  const bool coin1 = rng.bernoulli(params.q1);
  const bool coin2 = rng.bernoulli(params.q2);
  return Decision{coin1 && state.queue > 0, coin2 && state.battery > 0};
}

}  // namespace aoimac
