#pragma once

#include <stdexcept>
#include <string>

namespace onebit {

// Invalid argument or violated type invariant.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure failed to reach its requested accuracy.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}

  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

// Request exceeds a fixed resource bound (e.g. enumeration size).
class ResourceError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace onebit
