#pragma once

#include <stdexcept>
#include <string>

namespace todi {

// Base for every error the library raises. Callers that only care about
// "something went wrong" can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed data: wrong shapes, non-finite values, out-of-range indices.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A hyperparameter outside its admissible range (lambda, beta, V, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// A statistic that is undefined for the given data (e.g. zero variance).
class DegenerateStatistic : public Error {
 public:
  using Error::Error;
};

// The finite-difference oracle hit a non-finite loss evaluation.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

// Configuration text could not be turned into a valid run description.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace todi
