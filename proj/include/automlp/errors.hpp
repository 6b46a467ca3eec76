#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace automlp {

// Root of every error the library throws. The CLI maps subclasses onto exit
// codes (see cli/exit_codes.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class LookupError : public DataError {
 public:
  using DataError::DataError;
};

class SamplingError : public DataError {
 public:
  SamplingError(const std::string& what, std::size_t pool_size)
      : DataError(what), pool_size_(pool_size) {}
  std::size_t pool_size() const noexcept { return pool_size_; }

 private:
  std::size_t pool_size_;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace automlp
