#pragma once

#include <stdexcept>
#include <string>

namespace panosynth {

// Data and IO problems map to CLI exit code 2; numerical or degenerate
// inputs map to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

/// Inputs with mismatched sizes or other contract violations on data.
class InvalidInputError : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Zero-length vectors, zero baselines, all-hole inputs and similar.
class DegenerateInputError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace panosynth
