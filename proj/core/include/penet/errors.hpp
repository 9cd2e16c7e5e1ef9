#pragma once

#include <stdexcept>
#include <string>

namespace penet {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A class or part label is outside its valid range.
class LabelError : public Error {
 public:
  using Error::Error;
};

/// An operation was invoked in the wrong order (e.g. backward before forward).
class StateError : public Error {
 public:
  using Error::Error;
};

/// A cloud or embedding set has no points.
class EmptyCloudError : public Error {
 public:
  using Error::Error;
};

/// A flattened batch does not match its bs x N layout.
class LayoutError : public Error {
 public:
  using Error::Error;
};

/// Binary input (IDX, checkpoint) is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Point sampling requested more points than available.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration or dataset/model mismatch.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Ground-truth data violates a dataset invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace penet
