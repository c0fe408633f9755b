#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psychot {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A point literal or digit sequence that does not conform to its space.
class InvalidPoint : public Error {
public:
  using Error::Error;
};

// Structural or invariant violation in a configuration value. `path` is a
// JSON pointer into the scenario document when known.
class ValidationError : public Error {
public:
  ValidationError(std::string path, std::string message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)),
        message_(std::move(message)) {}

  const std::string& path() const noexcept { return path_; }
  const std::string& message() const noexcept { return message_; }

  // The same error addressed one level further out.
  ValidationError under(const std::string& prefix) const { return {prefix + path_, message_}; }

private:
  std::string path_;
  std::string message_;
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

} // namespace psychot
