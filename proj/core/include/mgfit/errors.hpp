#pragma once

#include <stdexcept>

namespace mgfit {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad or malformed input data (CSV rows, record files).
struct DataError : Error {
  using Error::Error;
};

// Invalid configuration or precondition violation caught before compute.
struct ConfigError : Error {
  using Error::Error;
};

// Inconsistent game state or arguments (history length, hyper mismatch).
struct GameError : Error {
  using Error::Error;
};

}  // namespace mgfit
