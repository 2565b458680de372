#pragma once

#include <stdexcept>
#include <string>

namespace bondlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or malformed column in an input file.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& column, const std::string& what)
      : Error(what), column_(column) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

// A data row that violates a record invariant. `row` is the 1-based data
// row number (the header is not counted).
class ValidationError : public Error {
 public:
  ValidationError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class ComputationError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace bondlab
