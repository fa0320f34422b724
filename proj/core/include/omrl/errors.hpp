#pragma once

#include <stdexcept>
#include <string>

namespace omrl {

/// Violated precondition on caller-supplied arguments.
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical computation left its valid domain (singular matrix, non-finite value).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// RK4 produced a non-finite stage.
class IntegrationDiverged : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// The identified mass matrix is singular or too ill-conditioned to invert.
class ModelUnusable : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Exploration penalty requested before any sample was collected.
class ScheduleUninitialized : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Malformed or unknown entry in an experiment configuration.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

}  // namespace omrl

namespace omrl {

/// Output could not be opened or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace omrl
