#pragma once

#include <stdexcept>
#include <string>

namespace simta {

// Error families map 1:1 onto CLI exit codes: IoError -> 3, DataError -> 4,
// NumericError -> 5. Usage errors (exit 2) are handled by the CLI layer.

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape mismatch in matrix/layer plumbing.
struct DimensionError : NumericError {
  using NumericError::NumericError;
};

// A prediction cannot be made (e.g. no serial data visible at the cutoff).
struct InsufficientDataError : DataError {
  using DataError::DataError;
};

}  // namespace simta
