#pragma once

#include <stdexcept>
#include <string>

namespace scatterkit {

// Every failure raised by the library derives from Error so callers can map
// the whole family to an exit code in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not fit the operation (non-divisible sizes, mismatched
/// band shapes, bad upsampling ratios).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range hyper-parameters (levels, orders, K, scales).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Values that are well-shaped but not acceptable (NaN input, non-unit phases).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Inputs that were supposed to come from the same forward pass but do not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace scatterkit
