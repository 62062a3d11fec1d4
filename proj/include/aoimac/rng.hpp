#pragma once

#include <cstdint>
#include <random>

namespace aoimac {

// 64-bit finalizer used to expand one root seed into substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One deterministic stream of uniforms. mt19937_64 output is fully specified
// by the standard and the 53-bit conversion is fixed here, so equal seeds
// give equal draws on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// The four named substreams of a single run, expanded from one root seed via
// a splitmix64 chain in this fixed order: data arrivals, energy arrivals,
// policy randomization, success draws. Policies draw only from policy(), so
// runs with equal seeds see identical arrival sample paths no matter which
// policy is being simulated.
class RngSet {
 public:
  explicit RngSet(std::uint64_t root_seed)
      : data_arrival_(next_seed(root_seed)),
        energy_arrival_(next_seed(root_seed)),
        policy_(next_seed(root_seed)),
        success_(next_seed(root_seed)) {}

  RngStream& data_arrival() { return data_arrival_; }
  RngStream& energy_arrival() { return energy_arrival_; }
  RngStream& policy() { return policy_; }
  RngStream& success() { return success_; }

 private:
  static std::uint64_t next_seed(std::uint64_t& chain) { return splitmix64(chain); }

  RngStream data_arrival_;
  RngStream energy_arrival_;
  RngStream policy_;
  RngStream success_;
};

}  // namespace aoimac
