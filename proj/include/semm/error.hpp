#pragma once

#include <stdexcept>
#include <string>

namespace semm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input; `field()` names the offending parameter.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Sequence text that does not follow the grammar. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Two events occupy the same time span.
class OverlapError : public Error {
 public:
  OverlapError(std::string first, std::string second)
      : Error("events overlap: " + first + " and " + second), first_(std::move(first)), second_(std::move(second)) {}
  const std::string& first() const noexcept { return first_; }
  const std::string& second() const noexcept { return second_; }

 private:
  std::string first_;
  std::string second_;
};

/// A timing or ordering constraint of a pulse sequence is violated.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// No sign change of the cancellation function on the scanned interval.
class NoRootFound : public Error {
 public:
  NoRootFound(double min_value, double argmin)
      : Error("no sign change found; minimum " + std::to_string(min_value) + " at x = " + std::to_string(argmin)),
        min_value_(min_value),
        argmin_(argmin) {}
  double min_value() const noexcept { return min_value_; }
  double argmin() const noexcept { return argmin_; }

 private:
  double min_value_;
  double argmin_;
};

}  // namespace semm
