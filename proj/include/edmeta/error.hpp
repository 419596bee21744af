#pragma once

#include <stdexcept>
#include <string>

namespace edmeta {

// Root of all library errors. Each subclass names the contract that was
// broken so callers (and the CLI) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class DiagnosticError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

// Importance weights too concentrated to trust; a direct refit is needed.
class DegenerateWeightsError : public Error {
 public:
  DegenerateWeightsError(const std::string& what, double kish_ess, double draws)
      : Error(what), kish_ess_(kish_ess), draws_(draws) {}
  double kish_ess() const { return kish_ess_; }
  double draws() const { return draws_; }

 private:
  double kish_ess_;
  double draws_;
};

// Input/output and parse failures. `where` names the file and line.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace edmeta
