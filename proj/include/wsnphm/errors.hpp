#pragma once

#include <stdexcept>
#include <string>

namespace wsnphm {

// Base for every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRegionError : public Error {
 public:
  using Error::Error;
};

class EmptyFleetError : public Error {
 public:
  using Error::Error;
};

class CoverageError : public Error {
 public:
  using Error::Error;
};

class ClusteringError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class FeatureLengthError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised when an internal invariant breaks (e.g. a routing cycle). These are
// bugs, not input errors.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace wsnphm
