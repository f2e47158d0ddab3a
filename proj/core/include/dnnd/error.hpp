#pragma once

#include <stdexcept>
#include <string>

namespace dnnd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unusable input data (files, edge sequences).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values or conflicting options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A model state violated one of its structural invariants.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint could not be read, or its contents do not match.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace dnnd
