#pragma once

#include <stdexcept>
#include <string>

namespace btns {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index extents or shapes do not match.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument violates an operation precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A dense evaluation would exceed the configured amplitude cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// The state is zero (or numerically indistinguishable from zero).
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

/// The requested graph kind is not handled by this routine.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Imaginary time evolution drove the state norm below the collapse floor.
class CollapseError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (ill-conditioned fit, singular stencil, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace btns
