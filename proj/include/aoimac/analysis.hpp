#pragma once

#include <cstdint>

#include "aoimac/channel.hpp"

namespace aoimac {

// Parameter point for the closed-form results under probabilistic random
// access: arrival rates, transmit probabilities and the channel matrix.
struct AnalyticInputs {
  double lambda = 0.0;
  double delta = 0.0;
  double q1 = 1.0;
  double q2 = 1.0;
  SuccessMatrix matrix;
};

// Moments of the inter-attempt gap T and the inter-delivery gap X of the
// status updater's renewal process.
struct RenewalMoments {
  double e_t = 1.0;   // E[T], slots
  double e_t2 = 1.0;  // E[T^2], slots^2
  double e_x = 1.0;   // E[X], slots
  double e_x2 = 1.0;  // E[X^2], slots^2
};

enum class OptimizerCase { OpenSet, Boundary };

struct OptimalProbabilities {
  double q1_star = 1.0;
  double q2_star = 1.0;
  OptimizerCase case_id = OptimizerCase::OpenSet;
  double xi = 0.0;  // back-off used to keep the service rate strictly above lambda
};

// Service probability of S1's head-of-line packet:
// mu = q1 * [p11 * (1 - m) + p112 * m] with m = min{delta, q2}.
double service_probability(const AnalyticInputs& in);

// Data queue stability: q1 > lambda / (p11 - m * (p11 - p112)).
bool is_stable(const AnalyticInputs& in);

// P[Q != 0] = lambda / mu for a stable queue. Throws StabilityViolationError.
double prob_queue_nonempty(const AnalyticInputs& in);

// Long-run success probability of the status updater, averaged over the
// interferer's busy state:
// p2bar = p22 - (p22 - p212) * lambda / (p11 - m * (p11 - p112)).
double s2_success_prob(const AnalyticInputs& in);

// E[T] = 1/m, E[T^2] = (2 - m)/m^2, E[X] = E[T]/p2bar,
// E[X^2] = E[T^2]/p2bar + E[T]^2 * 2(1 - p2bar)/p2bar^2.
// Throws DegenerateInputError when m = 0, StabilityViolationError when unstable.
RenewalMoments renewal_moments(const AnalyticInputs& in);

// pmf of the inter-attempt gap T at k >= 1, valid in the two analyzed
// regimes: energy-harvesting (delta <= q2, P[B != 0] = delta/q2) and
// grid-connected (delta = 1). Throws UnsupportedRegimeError otherwise.
double pmf_T(std::uint64_t k, double delta, double q2);

// Average AoI, direct form: 1 / (p2bar * min{delta, q2}). Agrees with the
// renewal-moment route E[X^2]/(2 E[X]) + 1/2 to within rounding.
double avg_aoi_closed_form(const AnalyticInputs& in);

// Average peak AoI E[X] = E[T]/p2bar; identical to the average AoI under
// this policy, returned through the same expression so the equality is exact.
double avg_paoi_closed_form(const AnalyticInputs& in);

// Age-optimal transmit probabilities subject to queue stability.
// Open-set case (delta below both 1 and the stability ratio): the canonical
// representative (1, 1). Boundary case: q1 = 1 and q2 at the stability
// threshold backed off by xi. Throws InfeasibleProblemError when
// lambda >= p11 and DegenerateXiError when xi swallows the feasible interval.
OptimalProbabilities optimal_probabilities(double lambda, double delta,
                                           const SuccessMatrix& matrix, double xi);

}  // namespace aoimac
