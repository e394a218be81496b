#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quidd {

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Handles from two different managers were combined.
class ManagerMismatch : public Error {
 public:
  ManagerMismatch() : Error("diagram handles belong to different managers") {}
};

/// A node was requested whose variable does not precede its children's.
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// Operand qubit counts do not fit the operation.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A measurement outcome has probability zero.
class ZeroProbability : public Error {
 public:
  ZeroProbability() : Error("measurement outcome has zero probability") {}
};

/// A run exceeded its configured time or size limit.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// Malformed circuit or set literal, addressed by 1-based line and column.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
              message),
        line_(line),
        column_(column),
        message_(message) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

}  // namespace quidd
