#pragma once

#include <stdexcept>
#include <string>

namespace mngap {

/// Argument outside the mathematical domain of a function (x outside [eps, Lambda],
/// negative samples fed to an operator defined on a nonnegative cone, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed call: inconsistent grids, bad counts, invalid ranges.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested quantity only exists for a coupling regime that the parameters
/// do not satisfy (e.g. the cutoff condition needs lambda > 2).
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The truncated integral of the infinite-domain operator cannot be certified
/// to the requested tolerance on the supplied grid.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double min_y_max)
      : std::runtime_error(what), min_y_max_(min_y_max) {}

  /// Smallest upper integration limit that would satisfy the certificate.
  double min_y_max() const noexcept { return min_y_max_; }

 private:
  double min_y_max_;
};

}  // namespace mngap
