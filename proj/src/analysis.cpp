#include "aoimac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aoimac/errors.hpp"

namespace aoimac {

namespace {

void check_probability(double p, const char* name) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw InvalidParameterError(std::string(name) + " must lie in [0, 1], got " +
                                std::to_string(p));
  }
}

void check_inputs(const AnalyticInputs& in) {
  check_probability(in.lambda, "lambda");
  check_probability(in.delta, "delta");
  check_probability(in.q1, "q1");
  check_probability(in.q2, "q2");
  validate_matrix(in.matrix);
}

double busy_weight(const AnalyticInputs& in) { return std::min(in.delta, in.q2); }

// p11 - m * (p11 - p112): the per-attempt success rate of S1 at q1 = 1,
// i.e. the denominator of the stability threshold.
double attempt_success_rate(const AnalyticInputs& in) {
  const double m = busy_weight(in);
  return in.matrix.p11 - m * (in.matrix.p11 - in.matrix.p112);
}

void require_stable(const AnalyticInputs& in, const char* op) {
  if (!is_stable(in)) {
    throw StabilityViolationError(std::string(op) + " requires a stable data queue");
  }
}

}  // namespace

double service_probability(const AnalyticInputs& in) {
  check_inputs(in);
  return in.q1 * attempt_success_rate(in);
}

bool is_stable(const AnalyticInputs& in) {
  check_inputs(in);
  const double denom = attempt_success_rate(in);
  if (denom <= 0.0) return false;
  return in.q1 > in.lambda / denom;
}

double prob_queue_nonempty(const AnalyticInputs& in) {
  require_stable(in, "prob_queue_nonempty");
  return in.lambda / service_probability(in);
}

double s2_success_prob(const AnalyticInputs& in) {
  require_stable(in, "s2_success_prob");
  return in.matrix.p22 -
         (in.matrix.p22 - in.matrix.p212) * in.lambda / attempt_success_rate(in);
}

RenewalMoments renewal_moments(const AnalyticInputs& in) {
  check_inputs(in);
  const double m = busy_weight(in);
  if (m <= 0.0) {
    throw DegenerateInputError("min{delta, q2} = 0: the age has no bounded mean");
  }
  require_stable(in, "renewal_moments");
  const double p2 = s2_success_prob(in);
  if (p2 <= 0.0) {
    throw DegenerateInputError("updater success probability is 0: the age has no bounded mean");
  }
  RenewalMoments out;
  out.e_t = 1.0 / m;
  out.e_t2 = (2.0 - m) / (m * m);
  out.e_x = out.e_t / p2;
  out.e_x2 = out.e_t2 / p2 + out.e_t * out.e_t * 2.0 * (1.0 - p2) / (p2 * p2);
  return out;
}

double pmf_T(std::uint64_t k, double delta, double q2) {
  if (k == 0) throw InvalidParameterError("pmf_T needs k >= 1");
  check_probability(delta, "delta");
  check_probability(q2, "q2");
  const bool grid = delta == 1.0;
  if (!grid && delta > q2) {
    throw UnsupportedRegimeError("pmf_T is only analyzed for delta <= q2 or delta = 1");
  }
  if (std::min(delta, q2) <= 0.0) {
    throw DegenerateInputError("no attempts ever happen when min{delta, q2} = 0");
  }

  const double p_nonempty = grid ? 1.0 : delta / q2;
  const double b = 1.0 - q2;
  double value = p_nonempty * std::pow(b, static_cast<double>(k - 1)) * q2;
  if (k >= 2 && p_nonempty < 1.0) {
    // sum_{l=1}^{k-1} a^{l-1} b^{k-1-l} = (a^{k-1} - b^{k-1}) / (a - b)
    const double a = 1.0 - delta;
    const double n = static_cast<double>(k - 1);
    const double homogeneous =
        a == b ? n * std::pow(a, n - 1.0) : (std::pow(a, n) - std::pow(b, n)) / (a - b);
    value += (1.0 - p_nonempty) * delta * q2 * homogeneous;
  }
  return value;
}

double avg_aoi_closed_form(const AnalyticInputs& in) {
  check_inputs(in);
  const double m = busy_weight(in);
  if (m <= 0.0) {
    throw DegenerateInputError("min{delta, q2} = 0: the age has no bounded mean");
  }
  require_stable(in, "avg_aoi_closed_form");
  const double p2 = s2_success_prob(in);
  if (p2 <= 0.0) {
    throw DegenerateInputError("updater success probability is 0: the age has no bounded mean");
  }
  return 1.0 / (p2 * m);
}

double avg_paoi_closed_form(const AnalyticInputs& in) {
  // E[X] = E[T]/p2bar reduces to the same closed form; routing through it
  // keeps the equality exact, not just within rounding.
  return avg_aoi_closed_form(in);
}

OptimalProbabilities optimal_probabilities(double lambda, double delta,
                                           const SuccessMatrix& matrix, double xi) {
  check_probability(lambda, "lambda");
  check_probability(delta, "delta");
  validate_matrix(matrix);
  if (!std::isfinite(xi) || xi <= 0.0) {
    throw InvalidParameterError("xi must be a small positive back-off, got " +
                                std::to_string(xi));
  }
  if (lambda >= matrix.p11) {
    throw InfeasibleProblemError("lambda = " + std::to_string(lambda) +
                                 " >= p11 = " + std::to_string(matrix.p11) +
                                 ": no policy keeps the data queue stable");
  }

  const double gap = matrix.p11 - matrix.p112;
  const double ratio =
      gap > 0.0 ? (matrix.p11 - lambda) / gap : std::numeric_limits<double>::infinity();

  OptimalProbabilities out;
  out.xi = xi;
  if (delta > 0.0 && delta < std::min(ratio, 1.0)) {
    // Open set {q1 above the stability threshold, q2 > delta}: the age is
    // constant on it, so return the canonical corner.
    out.q1_star = 1.0;
    out.q2_star = 1.0;
    out.case_id = OptimizerCase::OpenSet;
  } else {
    out.q1_star = 1.0;
    out.q2_star = std::min(ratio, delta) - xi;
    out.case_id = OptimizerCase::Boundary;
    if (out.q2_star <= 0.0) {
      throw DegenerateXiError("xi = " + std::to_string(xi) +
                              " swallows the feasible interval (threshold " +
                              std::to_string(std::min(ratio, delta)) + ")");
    }
  }

  const AnalyticInputs at_opt{lambda, delta, out.q1_star, out.q2_star, matrix};
  if (!is_stable(at_opt)) {
    throw DegenerateXiError("optimizer output is not strictly stable; xi too small for "
                            "this parameter point");
  }
  return out;
}

}  // namespace aoimac
