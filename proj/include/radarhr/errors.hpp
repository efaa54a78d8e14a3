#pragma once

#include <stdexcept>
#include <string>

namespace radarhr {

/// Bad argument to a library call (precondition violation).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but carries no usable information (e.g. constant series).
class DegenerateInput : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Requested K exceeds what the signal length can support.
class OverDecomposition : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Output would not fit in memory limits.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed or unreadable data file.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration (unknown keys, wrong types).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/inf appearing where a finite value is required.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radarhr
