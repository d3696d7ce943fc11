#pragma once

#include <stdexcept>
#include <string>

namespace lsr {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad mask parameter, bad dimensions, bad flags).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Malformed or inconsistent input data (files, records, ids).
class DataError : public Error {
  public:
    using Error::Error;
};

// Index persistence failures. Each corruption class is reported distinctly
// so callers can tell a stale file from a damaged one.
class IndexFormatError : public DataError {
  public:
    using DataError::DataError;
};

class IndexVersionError : public DataError {
  public:
    using DataError::DataError;
};

class IndexTruncatedError : public DataError {
  public:
    using DataError::DataError;
};

class IndexChecksumError : public DataError {
  public:
    using DataError::DataError;
};

}  // namespace lsr
