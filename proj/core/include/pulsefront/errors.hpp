#pragma once

#include <stdexcept>
#include <string>

namespace pulsefront {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Invalid geometry, reaction, grid or schedule parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config_error"; }
};

/// Linear or nonlinear solve that did not converge, or produced NaN.
class SolverError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "solver_error"; }
};

/// Malformed artifact (checkpoint, field dump) read back from disk.
class SchemaError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "schema_error"; }
};

}  // namespace pulsefront
