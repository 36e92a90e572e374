#pragma once

#include <stdexcept>
#include <string>

namespace gaf {

// Error taxonomy. Each class maps onto one failure mode callers are expected
// to distinguish (the CLI turns several of them into distinct exit codes).

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Quadrature or iteration failed to reach its tolerance.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gram matrix lost positive definiteness at working precision.
struct IllConditionedError : NumericalError {
  IllConditionedError(const std::string& what, int minor)
      : NumericalError(what), leading_minor(minor) {}
  int leading_minor;
};

/// A configured hard cap (degree, refinement count) would be exceeded.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RootFinderError : NumericalError {
  using NumericalError::NumericalError;
};

/// The section (or its polynomial part) is identically zero.
struct DegenerateSectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct ExperimentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gaf
