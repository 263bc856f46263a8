#pragma once

#include <stdexcept>
#include <string>

namespace cil {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or an inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that violates a format or a numeric invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix widths that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, const std::string& what);
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace cil
