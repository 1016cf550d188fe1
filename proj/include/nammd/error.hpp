#pragma once

#include <stdexcept>
#include <string>

namespace nammd {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input data (shapes, finiteness, probabilities).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Input that is well-formed but carries no information (e.g. all points identical).
class DegenerateInputError : public InputError {
 public:
  using InputError::InputError;
};

/// Invalid configuration of a procedure (iteration counts, empty kernel banks).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A requested target cannot be reached for the given parameters.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nammd
