#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace turnid {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input log or file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A documented precondition of an operation was violated by its input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure such as a non-finite loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace turnid
