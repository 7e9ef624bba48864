#pragma once

#include <stdexcept>
#include <string>

namespace geodesc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unusable input data (bad files, invalid configuration,
/// violated preconditions on user-supplied values).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A geometric operation could not proceed (degenerate mesh, stalled walk,
/// singular system).
class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace geodesc
