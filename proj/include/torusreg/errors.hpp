#pragma once

#include <stdexcept>
#include <string>

namespace torusreg {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite or otherwise malformed scalar input.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Operation requires a nonempty (or large-enough) sample.
class EmptySampleError : public Error {
 public:
  using Error::Error;
};

// Circular mean requested for a sample whose resultant length is ~0.
class UndefinedMeanError : public Error {
 public:
  using Error::Error;
};

// Model parameters violate the b2 != 0 requirement (constant-map collapse).
class DegenerateParameterError : public Error {
 public:
  using Error::Error;
};

// Every optimizer start failed to produce a usable minimum.
class FitFailureError : public Error {
 public:
  using Error::Error;
};

// CSV header does not bind all required logical fields.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Malformed or unusable data (file level, not row level).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace torusreg
