#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lhnn {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched vector/matrix sizes in an argument.
struct DimensionError : Error {
  using Error::Error;
};

// A numeric evaluation produced NaN/Inf or left the representable domain.
struct NumericalDomainError : Error {
  using Error::Error;
};

// Malformed input file (CSV, checkpoint).
struct ParseError : Error {
  using Error::Error;
};

// Invalid run/sampler/training configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Training diverged or violated its contract.
struct TrainingError : Error {
  using Error::Error;
};

// Leapfrog integration failed; carries the step index at which it failed.
struct IntegrationError : Error {
  std::size_t step = 0;
  explicit IntegrationError(const std::string& msg, std::size_t step_index = 0)
      : Error(msg), step(step_index) {}
};

// Diagnostics preconditions violated (constant chain, too few samples).
struct DiagnosticsError : Error {
  using Error::Error;
};

// Filesystem failure (missing file, unwritable output).
struct IoError : Error {
  using Error::Error;
};

}  // namespace lhnn
