#pragma once

#include <stdexcept>
#include <string>

namespace nlspec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The grid spacing is too coarse for the kernel scale being assembled.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A matrix or vector contains NaN or infinite values.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlspec
