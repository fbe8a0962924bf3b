#pragma once

#include <stdexcept>
#include <string>

namespace fwmbs {

// Two families, mapped to CLI exit codes 1 and 2 respectively.
// InputError: the caller handed us something malformed or out of domain.
// PhysicsError: the inputs were well-formed but the model has no answer
// (below cutoff, spectral overflow, unreachable design target, ...).

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PhysicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : InputError {
  using InputError::InputError;
};

struct ShapeError : InputError {
  using InputError::InputError;
};

/// Parse failure in a material or run-config file; carries the 1-based line.
struct ParseError : InputError {
  ParseError(std::string file, int line, const std::string& msg)
      : InputError(file + ":" + std::to_string(line) + ": " + msg),
        line_(line),
        file_(std::move(file)) {}
  int line() const noexcept { return line_; }
  const std::string& file() const noexcept { return file_; }

 private:
  int line_;
  std::string file_;
};

struct ConfigError : InputError {
  using InputError::InputError;
};

struct NoGuidedModeError : PhysicsError {
  using PhysicsError::PhysicsError;
};

struct NumericalError : PhysicsError {
  using PhysicsError::PhysicsError;
};

struct SpectralOverflowError : PhysicsError {
  using PhysicsError::PhysicsError;
};

struct StepSizeError : PhysicsError {
  using PhysicsError::PhysicsError;
};

struct UnreachableTargetError : PhysicsError {
  using PhysicsError::PhysicsError;
};

}  // namespace fwmbs
