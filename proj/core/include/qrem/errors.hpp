#pragma once

#include <stdexcept>
#include <string>

namespace qrem {

// Error taxonomy mirrors the CLI exit-code contract:
//   ValidationError -> 2, CapacityError -> 3, NumericalError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qrem
