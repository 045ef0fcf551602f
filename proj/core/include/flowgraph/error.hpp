#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flowgraph {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or self-contradictory input data (bad CSV rows, alias clashes).
struct DataError : Error {
  using Error::Error;
};

// A value violates the dataset schema (unknown label, out-of-range field).
struct SchemaError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Raised when optimization produces non-finite values; carries the epoch at
// which the run was aborted so callers can report partial history.
struct TrainingError : Error {
  TrainingError(const std::string& what, std::size_t epoch_index)
      : Error(what + " (epoch " + std::to_string(epoch_index) + ")"), epoch(epoch_index) {}
  std::size_t epoch;
};

}  // namespace flowgraph
