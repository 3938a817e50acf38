#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gcgm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DegenerateColumn : public Error {
 public:
  DegenerateColumn(std::size_t column, std::string name)
      : Error("column " + (name.empty() ? std::to_string(column) : name) +
              " is constant"),
        column_(column),
        name_(std::move(name)) {}

  std::size_t column() const noexcept { return column_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::size_t column_;
  std::string name_;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class MissingPilot : public Error {
 public:
  using Error::Error;
};

class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class MissingContext : public Error {
 public:
  using Error::Error;
};

class EmptyPath : public Error {
 public:
  using Error::Error;
};

/// Malformed data file. Row and column are 1-based positions in the file.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string& what)
      : Error("parse error at row " + std::to_string(row) + ", column " +
              std::to_string(col) + ": " + what),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

/// Carries every violation found while validating a configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid configuration:";
    for (const auto& item : items) out += "\n  - " + item;
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace gcgm
