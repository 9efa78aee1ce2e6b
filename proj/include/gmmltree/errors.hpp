#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gmmltree {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures caused by input data (files, label sets). The CLI maps these to
// exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string& what)
      : DataError(what), row_(row), col_(col) {}
  // 1-based line number in the file (header is line 1).
  std::size_t row() const noexcept { return row_; }
  // 0-based column index.
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class LabelError : public DataError {
 public:
  using DataError::DataError;
};

// Bad parameters (k > n, mtry out of range, empty dataset list, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller broke a precondition of a pure function (inconsistent counts,
// empty required list, non-probability vector).
class ContractError : public Error {
 public:
  using Error::Error;
};

class SingleClassError : public ContractError {
 public:
  using ContractError::ContractError;
};

class NoValidSplitError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace gmmltree
