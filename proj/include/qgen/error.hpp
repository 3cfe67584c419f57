#pragma once

#include <stdexcept>
#include <string>

namespace qgen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` and `column` are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line);
    if (column > 0) out += (out.empty() ? "column " : ", column ") + std::to_string(column);
    return out.empty() ? what : out + ": " + what;
  }

  int line_;
  int column_;
};

/// A relation path could not be followed in a tree; the template does not apply.
class NoMatch : public Error {
 public:
  using Error::Error;
};

/// The answer of a training triple could not be anchored in its source tree.
class AlignmentFailure : public Error {
 public:
  using Error::Error;
};

/// A training question would leave a content word as a literal.
class InductionFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace qgen
