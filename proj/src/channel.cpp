#include "aoimac/channel.hpp"

#include <cmath>
#include <string>

#include "aoimac/errors.hpp"

namespace aoimac {

namespace {

void check_link(const LinkBudget& link) {
  if (!std::isfinite(link.beta) || link.beta <= 0.0) {
    throw InvalidParameterError("link gain beta must be finite and > 0, got " +
                                std::to_string(link.beta));
  }
  if (!std::isfinite(link.theta) || link.theta < 0.0) {
    throw InvalidParameterError("decoding threshold theta must be finite and >= 0, got " +
                                std::to_string(link.theta));
  }
}

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

double solo_success(const LinkBudget& link) {
  check_link(link);
  return std::exp(-link.theta / link.beta);
}

double interfered_success(const LinkBudget& link, double interferer_beta) {
  check_link(link);
  if (!std::isfinite(interferer_beta) || interferer_beta < 0.0) {
    throw InvalidParameterError("interferer gain must be finite and >= 0, got " +
                                std::to_string(interferer_beta));
  }
  return std::exp(-link.theta / link.beta) /
         (1.0 + link.theta * interferer_beta / link.beta);
}

SuccessMatrix build_matrix(const LinkBudget& link1, const LinkBudget& link2) {
  return SuccessMatrix{
      .p11 = solo_success(link1),
      .p112 = interfered_success(link1, link2.beta),
      .p22 = solo_success(link2),
      .p212 = interfered_success(link2, link1.beta),
  };
}

void validate_matrix(const SuccessMatrix& m) {
  if (!is_probability(m.p11) || !is_probability(m.p112) || !is_probability(m.p22) ||
      !is_probability(m.p212)) {
    throw InvalidParameterError("success probabilities must lie in [0, 1]");
  }
  if (m.p112 > m.p11 || m.p212 > m.p22) {
    throw InvalidParameterError("interference cannot raise a success probability");
  }
}

std::pair<double, double> conditional_probs(const SuccessMatrix& m, Decision d) noexcept {
  if (d.tx1 && d.tx2) return {m.p112, m.p212};
  if (d.tx1) return {m.p11, 0.0};
  if (d.tx2) return {0.0, m.p22};
  return {0.0, 0.0};
}

MprClass mpr_class(const SuccessMatrix& m) {
  if (m.p11 <= 0.0 || m.p22 <= 0.0) {
    throw InvalidParameterError("mpr_class needs p11 > 0 and p22 > 0");
  }
  const double ratio_sum = m.p112 / m.p11 + m.p212 / m.p22;
  return ratio_sum < 1.0 ? MprClass::Weak : MprClass::Strong;
}

}  // namespace aoimac
