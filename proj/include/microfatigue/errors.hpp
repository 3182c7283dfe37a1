#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace microfatigue {

/// Input outside the domain of an operation (bad geometry, V above pull-in, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: a root finder or sweep did not converge.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stair-case data that cannot support an estimate (missing event type, ...).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Damage calibration targets that cannot be met simultaneously.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldError {
  std::string path;
  std::string message;
};

/// Config ingestion failure; carries every problem found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<FieldError> errors);

  const std::vector<FieldError>& errors() const noexcept { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

}  // namespace microfatigue
