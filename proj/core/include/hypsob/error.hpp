#pragma once

#include <stdexcept>
#include <string>

namespace hypsob {

/// Argument outside the mathematical domain of an operation (bad n, p, alpha,
/// negative radius, divergent tail, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A profile norm needed by an operation is infinite (tail too heavy).
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The profile is finite but not admissible for the requested operation
/// (e.g. non-compact support where compact support is required).
class AdmissibilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Adaptive quadrature or iteration did not reach its tolerance. Carries the
/// best partial value so callers can decide whether to degrade gracefully.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial_value, double error_estimate)
      : std::runtime_error(what), partial_value_(partial_value), error_estimate_(error_estimate) {}

  double partial_value() const noexcept { return partial_value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double partial_value_;
  double error_estimate_;
};

/// Root bracket does not straddle the target.
class BracketError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical guard tripped while evaluating an inequality (e.g. log of a
/// non-positive deficit term).
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed profile or config file. `line` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, const std::string& message)
      : std::runtime_error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                           message),
        file_(file),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }

 private:
  std::string file_;
  int line_;
};

}  // namespace hypsob
