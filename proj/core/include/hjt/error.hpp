#pragma once

#include <stdexcept>
#include <string>

namespace hjt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index or level outside the truncation.
class RangeError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Objects whose shape does not fit the host (dimension mismatch, bad cell
// indexing, broken domination chains).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// User supplied data that is incomplete or inconsistent (partial colorings,
// unknown builtins, bad budgets).
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column = 0)
      : Error(locate(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string locate(const std::string& what, int line, int column) {
    std::string out = "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  int line_;
  int column_;
};

}  // namespace hjt
