#pragma once

#include <stdexcept>
#include <string>

namespace quasix {

// Error taxonomy; mirrors the CLI exit codes and the C API status values.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or malformed data (ranges, dimensions, contract violations).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input file could not be parsed; message carries the source location.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A documented refusal: the requested combination is outside what the
// library constructs (e.g. Lawrence-lifting bases with more than two layers).
class Unsupported : public Error {
 public:
  using Error::Error;
};

// Enumeration hit its node cap before finishing.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace quasix
