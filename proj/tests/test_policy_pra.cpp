#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aoimac/analysis.hpp"
#include "aoimac/experiment.hpp"
#include "aoimac/policy_pra.hpp"

using namespace aoimac;

TEST_CASE("gating by queue and battery occupancy") {
  RngStream rng(1);
  const NetworkState empty{.t = 0, .queue = 0, .battery = 0, .age = 1};
  for (int i = 0; i < 50; ++i) {
    CHECK(pra_decide(empty, {1.0, 1.0}, rng) == Decision{false, false});
  }
  const NetworkState loaded{.t = 0, .queue = 3, .battery = 2, .age = 1};
  for (int i = 0; i < 50; ++i) {
    CHECK(pra_decide(loaded, {1.0, 1.0}, rng) == Decision{true, true});
    CHECK(pra_decide(loaded, {0.0, 0.0}, rng) == Decision{false, false});
  }
}

TEST_CASE("transmit fractions follow the coin biases") {
  RngStream rng(7);
  const NetworkState loaded{.t = 0, .queue = 5, .battery = 5, .age = 1};
  const PraParams params{0.7, 0.37};
  constexpr int kSlots = 100'000;
  int n1 = 0;
  int n2 = 0;
  int n12 = 0;
  for (int i = 0; i < kSlots; ++i) {
    const Decision d = pra_decide(loaded, params, rng);
    n1 += d.tx1 ? 1 : 0;
    n2 += d.tx2 ? 1 : 0;
    n12 += (d.tx1 && d.tx2) ? 1 : 0;
  }
  const double f1 = static_cast<double>(n1) / kSlots;
  const double f2 = static_cast<double>(n2) / kSlots;
  const double sigma1 = std::sqrt(params.q1 * (1 - params.q1) / kSlots);
  const double sigma2 = std::sqrt(params.q2 * (1 - params.q2) / kSlots);
  CHECK(std::abs(f1 - params.q1) <= 3.0 * sigma1);
  CHECK(std::abs(f2 - params.q2) <= 3.0 * sigma2);

  // the two coins are independent: sample covariance within 3 sigma of zero
  const double cov = static_cast<double>(n12) / kSlots - f1 * f2;
  const double sigma_cov =
      std::sqrt(params.q1 * (1 - params.q1) * params.q2 * (1 - params.q2) / kSlots);
  CHECK(std::abs(cov) <= 3.0 * sigma_cov);
}

TEST_CASE("xi-backed-off optimal parameters keep the queue bounded") {
  // boundary case: q2* sits just inside the stability region
  const SuccessMatrix matrix = weak_mpr();
  const OptimalProbabilities opt = optimal_probabilities(0.5, 1.0, matrix, 0.001);
  REQUIRE(opt.case_id == OptimizerCase::Boundary);
  PraPolicy policy(PraParams{opt.q1_star, opt.q2_star});
  const Metrics m = run({0.5, 1.0, 1'000'000, 0, 41}, policy, matrix);
  CHECK_FALSE(m.unstable);
  CHECK(m.avg_queue < 100.0);
}
