#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace nystrom {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  success = 0,
  config = 2,
  input_data = 3,
  numerical = 4,
};

/// Base class of every error raised by the library that maps to a CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, ExitCode code) : std::runtime_error(what), code_(code) {}
  ExitCode exit_code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Invalid experiment configuration. `field()` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error("config field '" + field + "': " + message, ExitCode::config), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Malformed or unreadable matrix/record input.
class InputDataError : public Error {
 public:
  enum class Kind { io, malformed_header, wrong_count, bad_number, non_finite, asymmetric };

  InputDataError(Kind kind, std::size_t line, const std::string& message)
      : Error(format(line, message), ExitCode::input_data), kind_(kind), line_(line) {}

  Kind kind() const noexcept { return kind_; }
  // 1-based; 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(std::size_t line, const std::string& message) {
    return line == 0 ? message : "line " + std::to_string(line) + ": " + message;
  }
  Kind kind_;
  std::size_t line_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what, ExitCode::numerical) {}
};

/// Eigenvalue below the PSD clamping tolerance.
class NotPsdError : public NumericalError {
 public:
  NotPsdError(double eigenvalue, double lambda_max)
      : NumericalError("matrix is not positive semidefinite: eigenvalue " + std::to_string(eigenvalue) +
                       " (largest " + std::to_string(lambda_max) + ")"),
        eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

class NonConvergenceError : public NumericalError {
 public:
  explicit NonConvergenceError(double residual)
      : NumericalError("eigensolver did not converge; off-diagonal residual " + std::to_string(residual)),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A bound was requested outside its hypotheses (rank-deficient Omega1,
/// non-positive eigengap). Distinct from the bound being infinite.
class BoundInapplicable : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace nystrom
