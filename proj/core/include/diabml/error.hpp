#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace diabml {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or semantically invalid input data (CSV cells, labels, shapes).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A configuration value outside its documented range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during training (non-finite loss or parameters).
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failures; the message always carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure with the pipeline stage in which it happened.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error("[" + stage + "] " + cause), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace diabml
