#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexc {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid simulation or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation called on an object it does not support (e.g. a stable model
// handed to the compound-jump simulator).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Precondition on an input object violated by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The requested quantity does not exist for this model (e.g. n(zeta) for an
// oscillating process).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Not enough samples to form an estimate. Carries the count that was seen.
class InsufficientDataError : public std::runtime_error {
 public:
  InsufficientDataError(const std::string& what, std::size_t count)
      : std::runtime_error(what + " (count=" + std::to_string(count) + ")"),
        count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

// Rejection sampler whose acceptance rate fell below the configured floor.
class AcceptanceFloorError : public std::runtime_error {
 public:
  AcceptanceFloorError(const std::string& what, double estimated_rate)
      : std::runtime_error(what + " (estimated acceptance rate=" +
                           std::to_string(estimated_rate) + ")"),
        rate_(estimated_rate) {}
  double estimated_rate() const noexcept { return rate_; }

 private:
  double rate_;
};

// Numerical Laplace inversion produced output violating a known property.
class InversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lexc
