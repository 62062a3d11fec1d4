#pragma once

#include <stdexcept>

namespace aoimac {

// Bad physical or model parameters (non-finite gain, probability out of range, ...).
class InvalidParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A run or experiment configuration fails validation (maps to CLI exit 3).
class InvalidConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Command-line / figure-id misuse (maps to CLI exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed-form result requested for an unstable data queue.
class StabilityViolationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// min{delta, q2} = 0: the age process has no bounded mean.
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inter-attempt pmf requested outside the two analyzed regimes.
class UnsupportedRegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// lambda >= p11: no policy can stabilize the data queue (maps to CLI exit 4).
class InfeasibleProblemError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The xi back-off swallows the whole feasible transmit-probability interval.
class DegenerateXiError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Backlog bound has no positive drift slack epsilon.
class NoValidEpsilonError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace aoimac
