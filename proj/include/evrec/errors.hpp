#pragma once

#include <stdexcept>
#include <string>

namespace evrec {

// Error taxonomy shared by all modules. The CLI maps InvalidParameter and
// DimensionMismatch to usage errors (exit 2), everything else to runtime
// failures (exit 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class SolverDiverged : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace evrec
