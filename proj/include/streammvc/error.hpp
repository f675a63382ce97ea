#pragma once

#include <stdexcept>
#include <string>

namespace smvc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: shape mismatches, duplicate ids, non-finite entries.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Parameters that cannot be honored (k larger than the sample count, d_t < k, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The missing-data protocol cannot be applied without losing a sample.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Unreadable, truncated or version-mismatched files.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A factorization produced non-finite output.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace smvc
