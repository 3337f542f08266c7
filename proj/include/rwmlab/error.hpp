#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rwmlab {

/// Argument outside the mathematical domain of an operation (x = 0 under a
/// scale mixture, z <= 0, sigma <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid parameters of a spec or an experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every violation found while validating a configuration document.
class ConfigValidationError : public ConfigError {
 public:
  explicit ConfigValidationError(std::vector<std::string> errors)
      : ConfigError(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out = "invalid configuration:";
    for (const auto& e : errors) out += "\n  " + e;
    return out;
  }
  std::vector<std::string> errors_;
};

/// A numerical routine failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index or horizon beyond what a trajectory recorded.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Caller broke a documented precondition (e.g. an unbounded test function
/// passed where a bounded one is required).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A finished sweep lacks the rows a post-processing step needs. what()
/// names the offending cell.
class MissingDiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A chain produced a non-finite state. what() carries the record dump.
class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rwmlab
