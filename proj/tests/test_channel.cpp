#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "aoimac/channel.hpp"
#include "aoimac/errors.hpp"

using namespace aoimac;

namespace {

// 12 dB / 10 dB link budgets with -1 dB (strong MPR) or +1 dB (weak MPR)
// decoding thresholds.
const double kBeta1 = std::pow(10.0, 1.2);
const double kBeta2 = 10.0;
const double kThetaStrong = std::pow(10.0, -0.1);
const double kThetaWeak = std::pow(10.0, 0.1);

}  // namespace

TEST_CASE("solo success probability") {
  CHECK(solo_success({kBeta1, kThetaStrong}) == doctest::Approx(0.95111650).epsilon(1e-6));
  CHECK(solo_success({kBeta2, kThetaStrong}) == doctest::Approx(0.92364006).epsilon(1e-6));
  CHECK(solo_success({3.7, 0.0}) == 1.0);  // zero threshold always decodes
}

TEST_CASE("solo success rejects bad parameters") {
  CHECK_THROWS_AS(solo_success({0.0, 1.0}), InvalidParameterError);
  CHECK_THROWS_AS(solo_success({-2.0, 1.0}), InvalidParameterError);
  CHECK_THROWS_AS(solo_success({std::nan(""), 1.0}), InvalidParameterError);
  CHECK_THROWS_AS(solo_success({1.0, -0.5}), InvalidParameterError);
}

TEST_CASE("interfered success probability") {
  CHECK(interfered_success({kBeta1, kThetaStrong}, kBeta2) ==
        doctest::Approx(0.63357620).epsilon(1e-6));
  CHECK(interfered_success({kBeta1, kThetaWeak}, kBeta2) ==
        doctest::Approx(0.51475535).epsilon(1e-6));
  // no interferer term
  const LinkBudget link{kBeta1, kThetaStrong};
  CHECK(interfered_success(link, 0.0) == solo_success(link));
  CHECK_THROWS_AS(interfered_success(link, -1.0), InvalidParameterError);
}

TEST_CASE("build_matrix reproduces both operating points") {
  const SuccessMatrix strong = build_matrix({kBeta1, kThetaStrong}, {kBeta2, kThetaStrong});
  CHECK(strong.p11 == doctest::Approx(0.95111650).epsilon(1e-6));
  CHECK(strong.p112 == doctest::Approx(0.63357620).epsilon(1e-6));
  CHECK(strong.p22 == doctest::Approx(0.92364006).epsilon(1e-6));
  CHECK(strong.p212 == doctest::Approx(0.40888471).epsilon(1e-6));

  const SuccessMatrix weak = build_matrix({kBeta1, kThetaWeak}, {kBeta2, kThetaWeak});
  CHECK(weak.p11 == doctest::Approx(0.92364006).epsilon(1e-6));
  CHECK(weak.p112 == doctest::Approx(0.51475535).epsilon(1e-6));
  CHECK(weak.p22 == doctest::Approx(0.88170959).epsilon(1e-6));
  CHECK(weak.p212 == doctest::Approx(0.29436807).epsilon(1e-6));

  const SuccessMatrix trivial = build_matrix({1.0, 0.0}, {2.0, 0.0});
  CHECK(trivial == SuccessMatrix{1.0, 1.0, 1.0, 1.0});
}

TEST_CASE("conditional probabilities follow the decision table") {
  const SuccessMatrix strong{0.95, 0.63, 0.924, 0.41};
  CHECK(conditional_probs(strong, {true, true}) == std::pair{0.63, 0.41});
  CHECK(conditional_probs(strong, {true, false}) == std::pair{0.95, 0.0});
  CHECK(conditional_probs(strong, {false, true}) == std::pair{0.0, 0.924});
  CHECK(conditional_probs(strong, {false, false}) == std::pair{0.0, 0.0});
}

TEST_CASE("mpr classification") {
  const SuccessMatrix strong = build_matrix({kBeta1, kThetaStrong}, {kBeta2, kThetaStrong});
  const SuccessMatrix weak = build_matrix({kBeta1, kThetaWeak}, {kBeta2, kThetaWeak});
  CHECK(strong.p112 / strong.p11 + strong.p212 / strong.p22 ==
        doctest::Approx(1.10882779).epsilon(1e-6));
  CHECK(weak.p112 / weak.p11 + weak.p212 / weak.p22 ==
        doctest::Approx(0.89117221).epsilon(1e-6));
  CHECK(mpr_class(strong) == MprClass::Strong);
  CHECK(mpr_class(weak) == MprClass::Weak);

  // ratio sum exactly 1 classifies Strong
  CHECK(mpr_class(SuccessMatrix{0.8, 0.8, 1.0, 0.0}) == MprClass::Strong);
  CHECK_THROWS_AS(mpr_class(SuccessMatrix{0.0, 0.0, 1.0, 0.5}), InvalidParameterError);
}

TEST_CASE("matrix validation enforces the type invariants") {
  CHECK_NOTHROW(validate_matrix({0.95, 0.63, 0.924, 0.41}));
  CHECK_THROWS_AS(validate_matrix({1.2, 0.5, 0.9, 0.4}), InvalidParameterError);
  CHECK_THROWS_AS(validate_matrix({0.9, -0.1, 0.9, 0.4}), InvalidParameterError);
  CHECK_THROWS_AS(validate_matrix({0.5, 0.6, 0.9, 0.4}), InvalidParameterError);  // p112 > p11
  CHECK_THROWS_AS(validate_matrix({0.9, 0.5, 0.3, 0.4}), InvalidParameterError);  // p212 > p22
}

TEST_CASE("solo success is monotone in theta and beta") {
  double prev = 1.1;
  for (double theta = 0.0; theta <= 4.0; theta += 0.25) {
    const double p = solo_success({kBeta1, theta});
    CHECK(p < prev);
    prev = p;
  }
  prev = 0.0;
  for (double beta = 0.5; beta <= 40.0; beta *= 1.5) {
    const double p = solo_success({beta, 1.0});
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("interference never helps and random matrices keep the invariants") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const LinkBudget l1{0.1 + 40.0 * u(gen), 4.0 * u(gen)};
    const LinkBudget l2{0.1 + 40.0 * u(gen), 4.0 * u(gen)};
    CHECK(interfered_success(l1, l2.beta) <= solo_success(l1));
    CHECK_NOTHROW(validate_matrix(build_matrix(l1, l2)));
  }
  // equality holds exactly when theta * beta_j = 0
  CHECK(interfered_success({2.0, 0.0}, 7.0) == solo_success({2.0, 0.0}));
  CHECK(interfered_success({2.0, 1.3}, 7.0) < solo_success({2.0, 1.3}));
}

TEST_CASE("decision index ordering") {
  CHECK(decision_index({false, false}) == 0);
  CHECK(decision_index({false, true}) == 1);
  CHECK(decision_index({true, false}) == 2);
  CHECK(decision_index({true, true}) == 3);
  CHECK(kDecisionOrder[0] == Decision{false, false});
  CHECK(kDecisionOrder[3] == Decision{true, true});
}
