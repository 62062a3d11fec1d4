#pragma once

#include <array>
#include <utility>

namespace aoimac {

// Scheduling action for one slot: which of the two sources transmits.
struct Decision {
  bool tx1 = false;
  bool tx2 = false;

  friend bool operator==(const Decision&, const Decision&) = default;
};

// Enumeration order used for deterministic argmax tie-breaking:
// fewer active transmitters first, then (0,1) before (1,0).
inline constexpr std::array<Decision, 4> kDecisionOrder{
    {{false, false}, {false, true}, {true, false}, {true, true}}};

// Histogram index: (tx1 << 1) | tx2.
constexpr int decision_index(Decision d) noexcept {
  return (d.tx1 ? 2 : 0) + (d.tx2 ? 1 : 0);
}

// One uplink: large-scale gain normalized over transmit power and noise
// variance, and the SNR/SINR decoding threshold. Both linear scale; any
// dB conversion happens at the CLI boundary.
struct LinkBudget {
  double beta = 1.0;
  double theta = 0.0;
};

// The four conditional success probabilities that drive every transmission
// outcome. Can be built from link budgets or supplied directly, since the
// analysis depends on the channel only through these values.
struct SuccessMatrix {
  double p11 = 1.0;   // S1 succeeds, S1 alone on the channel
  double p112 = 1.0;  // S1 succeeds, both transmitting
  double p22 = 1.0;   // S2 succeeds, S2 alone
  double p212 = 1.0;  // S2 succeeds, both transmitting

  friend bool operator==(const SuccessMatrix&, const SuccessMatrix&) = default;
};

enum class MprClass { Weak, Strong };

// P{SNR >= theta} for a Rayleigh-faded link: exp(-theta/beta).
double solo_success(const LinkBudget& link);

// P{SINR >= theta} with one Rayleigh interferer of gain interferer_beta:
// exp(-theta/beta) / (1 + theta * interferer_beta / beta).
double interfered_success(const LinkBudget& link, double interferer_beta);

SuccessMatrix build_matrix(const LinkBudget& link1, const LinkBudget& link2);

// Enforces the type invariants (entries in [0,1], interference never helps).
// Throws InvalidParameterError.
void validate_matrix(const SuccessMatrix& m);

// Per-slot conditional success probabilities (p1, p2) for a decision:
// (1,1)->(p112,p212), (1,0)->(p11,0), (0,1)->(0,p22), (0,0)->(0,0).
std::pair<double, double> conditional_probs(const SuccessMatrix& m, Decision d) noexcept;

// Strong iff p112/p11 + p212/p22 >= 1 (boundary classified Strong).
// Throws InvalidParameterError when p11 or p22 is zero.
MprClass mpr_class(const SuccessMatrix& m);

// Both uplinks of the fading-sample channel model.
struct FadingPair {
  LinkBudget link1;
  LinkBudget link2;
};

}  // namespace aoimac
