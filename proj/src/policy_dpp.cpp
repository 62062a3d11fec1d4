#include "aoimac/policy_dpp.hpp"

#include <algorithm>
#include <string>

#include "aoimac/errors.hpp"

namespace aoimac {

namespace {

// Shared argmax: weight2 multiplies p2 (v*H*A for the age rule, z*H for the
// peak-age rule), weight1 multiplies p1 (always Q). Iterating kDecisionOrder
// with a strict improvement implements the documented tie-breaking.
Decision best_decision(const SuccessMatrix& matrix, double weight1, double weight2) {
  Decision best = kDecisionOrder[0];
  double best_score = 0.0;
  for (const Decision d : kDecisionOrder) {
    const auto [p1, p2] = conditional_probs(matrix, d);
    const double score = p1 * weight1 + p2 * weight2;
    if (score > best_score) {
      best = d;
      best_score = score;
    }
  }
  return best;
}

}  // namespace

Decision dpp_aoi_decide(const NetworkState& state, const SuccessMatrix& matrix,
                        const DppAoiParams& params) {
  const double h = state.battery_nonempty() ? 1.0 : 0.0;
  return best_decision(matrix, static_cast<double>(state.queue),
                       params.v * h * static_cast<double>(state.age));
}

Decision dpp_paoi_decide(const NetworkState& state, double virtual_queue,
                         const SuccessMatrix& matrix) {
  const double h = state.battery_nonempty() ? 1.0 : 0.0;
  return best_decision(matrix, static_cast<double>(state.queue), virtual_queue * h);
}

double alpha_select(double virtual_queue, const DppPaoiParams& params) {
  return virtual_queue <= params.v ? params.alpha_max : 0.0;
}

double virtual_queue_update(double z, double alpha, bool battery_nonempty, bool success2) {
  const double service = (battery_nonempty && success2) ? 1.0 : 0.0;
  return std::max(z + alpha - service, 0.0);
}

double backlog_bound(DppMode mode, double lambda, double delta, const SuccessMatrix& matrix,
                     double v, double alpha_max) {
  const double eps = std::min(matrix.p11 - lambda, delta * matrix.p212);
  if (eps <= 0.0) {
    throw NoValidEpsilonError("no positive drift slack: min{p11 - lambda, delta * p212} = " +
                              std::to_string(eps));
  }
  const double c = mode == DppMode::Aoi ? (lambda * lambda + 1.0) / 2.0
                                        : (alpha_max * alpha_max + lambda * lambda + 2.0) / 2.0;
  return (c + v) / eps;
}

}  // namespace aoimac
