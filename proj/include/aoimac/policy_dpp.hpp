#pragma once

#include "aoimac/engine.hpp"

namespace aoimac {

struct DppAoiParams {
  double v = 200.0;  // weight on the age penalty
};

struct DppPaoiParams {
  double v = 200.0;
  double alpha_max = 1.0;  // cap on the auxiliary variable
};

enum class DppMode { Aoi, Paoi };

// Argmax over the four decisions of p1*Q + v*p2*H*A. Ties go to fewer active
// transmitters, then to the fixed order (0,0) < (0,1) < (1,0) < (1,1); with
// all-zero scores the channel stays idle.
Decision dpp_aoi_decide(const NetworkState& state, const SuccessMatrix& matrix,
                        const DppAoiParams& params);

// Argmax over the four decisions of z*H*p2 + Q*p1, same tie-breaking.
Decision dpp_paoi_decide(const NetworkState& state, double virtual_queue,
                         const SuccessMatrix& matrix);

// alpha(t) = alpha_max while the virtual queue is at or below v, else 0.
double alpha_select(double virtual_queue, const DppPaoiParams& params);

// Z(t+1) = max(Z + alpha - H*b2, 0).
double virtual_queue_update(double z, double alpha, bool battery_nonempty, bool success2);

// Upper-bound certificate on the time-average data backlog: (C + v) / eps
// with eps = min{p11 - lambda, delta * p212} and C the mode-specific drift
// constant. Throws NoValidEpsilonError when no positive eps exists.
double backlog_bound(DppMode mode, double lambda, double delta, const SuccessMatrix& matrix,
                     double v, double alpha_max);

class DppAoiPolicy final : public Policy {
 public:
  DppAoiPolicy(const SuccessMatrix& matrix, DppAoiParams params)
      : matrix_(matrix), params_(params) {}

  Decision decide(const NetworkState& state, RngStream&) override {
    return dpp_aoi_decide(state, matrix_, params_);
  }

 private:
  SuccessMatrix matrix_;
  DppAoiParams params_;
};

// Owns the virtual queue Z; the auxiliary variable is selected and Z updated
// once per slot after the outcome is known.
class DppPaoiPolicy final : public Policy {
 public:
  DppPaoiPolicy(const SuccessMatrix& matrix, DppPaoiParams params)
      : matrix_(matrix), params_(params) {}

  Decision decide(const NetworkState& state, RngStream&) override {
    return dpp_paoi_decide(state, z_, matrix_);
  }

  void after_slot(const NetworkState& state, const SlotEvents& events) override {
    const double alpha = alpha_select(z_, params_);
    z_ = virtual_queue_update(z_, alpha, state.battery_nonempty(), events.success2);
  }

  void reset() override { z_ = 0.0; }

  double virtual_queue() const { return z_; }

 private:
  SuccessMatrix matrix_;
  DppPaoiParams params_;
  double z_ = 0.0;
};

}  // namespace aoimac
