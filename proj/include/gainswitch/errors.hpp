#pragma once

#include <stdexcept>
#include <string>

namespace gainswitch {

/// Argument outside the documented domain of an operation (t outside [0, T], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent input data: parameter files, traces, signals.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No pulse duration satisfies a requested slew-rate limit.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The laser never reached threshold during a simulation.
class NoLasingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric is not defined for the given signal (e.g. all-zero window).
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pulse does not return below half maximum inside the record.
class UnboundedPulseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive integration failed; `time()` is where it gave up.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t)
      : std::runtime_error(what + " at t = " + std::to_string(t) + " s"), time_(t) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace gainswitch
