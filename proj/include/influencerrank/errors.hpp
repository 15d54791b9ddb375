#pragma once

#include <stdexcept>
#include <string>

namespace infrank {

// Error families. Each maps onto one stable C API status / CLI exit code.

// Caller violated an operation contract (bad arguments, empty inputs).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Matrix or vector dimensions do not line up.
class ShapeError : public ContractError {
 public:
  using ContractError::ContractError;
};

// Malformed, missing, or inconsistent input data (files, records).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training or verification produced a non-finite or out-of-tolerance number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace infrank
