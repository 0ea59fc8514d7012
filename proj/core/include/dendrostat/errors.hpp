#pragma once

#include <stdexcept>
#include <string>

namespace dendrostat {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text (CSV rows, headers). Carries a 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A value outside its mathematical domain (non-positive width,
/// non-stationary coefficients, probability outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Interior missing value in a ring-width column.
class GapError : public Error {
 public:
  using Error::Error;
};

/// Series whose year spans have an empty intersection.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Input sequence shorter than an operation requires.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// Unknown identifier (series id, column name).
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A regressor failed inside cross validation; message names fold and kind.
class BenchmarkError : public Error {
 public:
  using Error::Error;
};

/// Requested result is not available on this object (e.g. absent std errors).
class UnavailableError : public Error {
 public:
  using Error::Error;
};

/// Filesystem-level failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dendrostat
