#pragma once

#include <stdexcept>
#include <string>

namespace vista {

/// Bad or inconsistent user input: unknown names, dimension mismatch, missing keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A threshold or learning-rate policy was asked to do something it does not allow.
class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a precondition of an operation.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed input file. The message names the line and column.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// The equilibrium solver could not produce a best response.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pathwise or statistical invariant failed on recorded data.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vista
