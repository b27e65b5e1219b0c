#pragma once

#include <stdexcept>
#include <string>

namespace bcnls {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValidationKind {
  dimension,
  components,
  exponent_range,
  coupling_shape,
  coupling_symmetry,
  coupling_positivity,
  invalid_pair,
  options,
};

const char* to_string(ValidationKind kind);

class ValidationError : public Error {
 public:
  ValidationError(ValidationKind kind, const std::string& message)
      : Error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}
  ValidationKind kind() const noexcept { return kind_; }

 private:
  ValidationKind kind_;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Quantity undefined at the given input (zero denominator, 2α+Nβ = 0, P = 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, int iterations, double residual)
      : Error(message), iterations_(iterations), residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Time integration stopped early; the state up to last_reliable_time is valid.
class SimulationAbort : public Error {
 public:
  SimulationAbort(const std::string& message, double last_reliable_time)
      : Error(message), last_reliable_time_(last_reliable_time) {}
  double last_reliable_time() const noexcept { return last_reliable_time_; }

 private:
  double last_reliable_time_;
};

}  // namespace bcnls
